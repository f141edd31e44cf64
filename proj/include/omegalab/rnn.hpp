#pragma once

// Single-layer Elman recognizer over one-hot symbol inputs:
//
//   h_t = tanh(W_in x_t + W_rec h_{t-1} + b_h),   h_0 = 0
//   logits = W_out h_L + b_out   (L = each element's own last position)
//
// Two output logits with softmax cross-entropy; gradients by full
// backpropagation through time. Everything is double precision and
// bit-deterministic for a given seed on a single thread. Elements shorter
// than the batch's padded length keep their hidden state frozen past their
// last symbol, so padding never reads symbols nor affects logits or
// gradients.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "omegalab/automaton.hpp"
#include "omegalab/rng.hpp"
#include "omegalab/sampling.hpp"

namespace omegalab {

struct RnnParams {
  Eigen::MatrixXd w_in;   // hidden x alphabet_size
  Eigen::MatrixXd w_rec;  // hidden x hidden
  Eigen::VectorXd b_h;    // hidden
  Eigen::MatrixXd w_out;  // 2 x hidden
  Eigen::VectorXd b_out;  // 2

  int hidden() const { return static_cast<int>(w_in.rows()); }
  int alphabet_size() const { return static_cast<int>(w_in.cols()); }

  bool all_finite() const {
    return w_in.allFinite() && w_rec.allFinite() && b_h.allFinite() &&
           w_out.allFinite() && b_out.allFinite();
  }

  template <typename F>
  void for_each_tensor(F&& f) {
    f(w_in);
    f(w_rec);
    f(b_h);
    f(w_out);
    f(b_out);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    f(w_in);
    f(w_rec);
    f(b_h);
    f(w_out);
    f(b_out);
  }
};

inline RnnParams zeros_like(const RnnParams& p) {
  RnnParams z;
  z.w_in = Eigen::MatrixXd::Zero(p.w_in.rows(), p.w_in.cols());
  z.w_rec = Eigen::MatrixXd::Zero(p.w_rec.rows(), p.w_rec.cols());
  z.b_h = Eigen::VectorXd::Zero(p.b_h.size());
  z.w_out = Eigen::MatrixXd::Zero(p.w_out.rows(), p.w_out.cols());
  z.b_out = Eigen::VectorXd::Zero(p.b_out.size());
  return z;
}

inline RnnParams zero_params(int alphabet_size, int hidden) {
  RnnParams p;
  p.w_in = Eigen::MatrixXd::Zero(hidden, alphabet_size);
  p.w_rec = Eigen::MatrixXd::Zero(hidden, hidden);
  p.b_h = Eigen::VectorXd::Zero(hidden);
  p.w_out = Eigen::MatrixXd::Zero(2, hidden);
  p.b_out = Eigen::VectorXd::Zero(2);
  return p;
}

// Glorot-uniform weights (entries uniform in +-sqrt(6/(fan_in+fan_out)),
// drawn row-major per matrix in the order W_in, W_rec, W_out), zero biases.
inline RnnParams init_params(int alphabet_size, int hidden, std::uint64_t seed) {
  if (alphabet_size < 1 || hidden < 1)
    throw std::invalid_argument("init_params: sizes >= 1");
  RnnParams p = zero_params(alphabet_size, hidden);
  Rng rng(seed);
  auto fill = [&rng](Eigen::MatrixXd& m, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
  };
  fill(p.w_in, alphabet_size, hidden);
  fill(p.w_rec, hidden, hidden);
  fill(p.w_out, hidden, 2);
  return p;
}

// L2 norm of every trainable entry, weights and biases alike.
inline double param_l2_norm(const RnnParams& p) {
  double ss = 0.0;
  p.for_each_tensor([&ss](const auto& t) { ss += t.squaredNorm(); });
  return std::sqrt(ss);
}

// Sum of squared weight-matrix entries; biases are not regularized.
inline double weight_squared_sum(const RnnParams& p) {
  return p.w_in.squaredNorm() + p.w_rec.squaredNorm() + p.w_out.squaredNorm();
}

struct Batch {
  int size = 0;
  int max_len = 0;
  std::vector<Symbol> syms;  // size * max_len, row-major per element
  std::vector<int> lengths;
  std::vector<int> labels;

  Symbol sym(int b, int t) const {
    return syms[static_cast<std::size_t>(b) * max_len + t];
  }

  // Encodes records as u $ v index sequences. pad_to extends the padded
  // width beyond the longest element (0 = fit exactly).
  static Batch from_records(std::span<const SequenceRecord> records,
                            const Alphabet& alphabet, int pad_to = 0) {
    Batch batch;
    batch.size = static_cast<int>(records.size());
    for (const auto& r : records) batch.max_len = std::max(batch.max_len, r.length());
    batch.max_len = std::max(batch.max_len, pad_to);
    batch.syms.assign(static_cast<std::size_t>(batch.size) * batch.max_len, 0);
    batch.lengths.resize(records.size());
    batch.labels.resize(records.size());
    for (int b = 0; b < batch.size; ++b) {
      const auto enc = encode(records[b].u, records[b].v, alphabet);
      batch.lengths[b] = static_cast<int>(enc.size());
      batch.labels[b] = records[b].label ? 1 : 0;
      for (std::size_t t = 0; t < enc.size(); ++t)
        batch.syms[static_cast<std::size_t>(b) * batch.max_len + t] = enc[t];
    }
    return batch;
  }
};

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> h;  // h[t]: hidden x batch after symbol t
  Batch batch;                     // symbols and lengths for the backward pass
};

namespace rnn_detail {

// One recurrence step; columns past their element's length keep h frozen.
inline void step_hidden(const RnnParams& p, const Batch& batch, int t,
                        const Eigen::MatrixXd& h_prev, Eigen::MatrixXd& h_next) {
  Eigen::MatrixXd pre = p.w_rec * h_prev;
  pre.colwise() += p.b_h;
  h_next.resize(h_prev.rows(), h_prev.cols());
  for (int b = 0; b < batch.size; ++b) {
    if (t < batch.lengths[b]) {
      pre.col(b) += p.w_in.col(batch.sym(b, t));
      h_next.col(b) = pre.col(b).array().tanh();
    } else {
      h_next.col(b) = h_prev.col(b);
    }
  }
}

}  // namespace rnn_detail

inline Eigen::MatrixXd readout(const RnnParams& p, const Eigen::MatrixXd& h_final) {
  Eigen::MatrixXd logits = p.w_out * h_final;
  logits.colwise() += p.b_out;
  return logits;
}

// Logits only; no trace kept.
inline Eigen::MatrixXd forward_logits(const RnnParams& p, const Batch& batch) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.hidden(), batch.size);
  Eigen::MatrixXd h_next;
  for (int t = 0; t < batch.max_len; ++t) {
    rnn_detail::step_hidden(p, batch, t, h, h_next);
    h.swap(h_next);
  }
  return readout(p, h);
}

struct ForwardResult {
  Eigen::MatrixXd logits;  // 2 x batch
  ForwardTrace trace;
};

inline ForwardResult forward(const RnnParams& p, const Batch& batch) {
  ForwardResult res;
  res.trace.batch = batch;
  res.trace.h.resize(static_cast<std::size_t>(batch.max_len));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.hidden(), batch.size);
  for (int t = 0; t < batch.max_len; ++t) {
    rnn_detail::step_hidden(p, batch, t, h, res.trace.h[static_cast<std::size_t>(t)]);
    h = res.trace.h[static_cast<std::size_t>(t)];
  }
  res.logits = readout(p, h);
  return res;
}

struct LossResult {
  double value = 0.0;
  Eigen::MatrixXd d_logits;  // (softmax - onehot) / batch
};

inline LossResult cross_entropy(const Eigen::MatrixXd& logits,
                                std::span<const int> labels) {
  const int n = static_cast<int>(logits.cols());
  LossResult res;
  res.d_logits.resize(2, n);
  double total = 0.0;
  for (int b = 0; b < n; ++b) {
    const double m = std::max(logits(0, b), logits(1, b));
    const double e0 = std::exp(logits(0, b) - m);
    const double e1 = std::exp(logits(1, b) - m);
    const double z = e0 + e1;
    const double p0 = e0 / z;
    const double p1 = e1 / z;
    const int y = labels[static_cast<std::size_t>(b)];
    total += -(std::log(y == 0 ? p0 : p1));
    res.d_logits(0, b) = (p0 - (y == 0 ? 1.0 : 0.0)) / n;
    res.d_logits(1, b) = (p1 - (y == 1 ? 1.0 : 0.0)) / n;
  }
  res.value = total / n;
  return res;
}

// Exact gradients of  mean cross-entropy + l2_weight * sum(weights^2)
// (biases excluded from the penalty) via reverse accumulation through time.
inline RnnParams backward(const RnnParams& p, const ForwardTrace& trace,
                          const Eigen::MatrixXd& d_logits, double l2_weight) {
  const Batch& batch = trace.batch;
  const int T = batch.max_len;
  RnnParams g = zeros_like(p);

  const Eigen::MatrixXd& h_final = trace.h[static_cast<std::size_t>(T - 1)];
  g.w_out = d_logits * h_final.transpose();
  g.b_out = d_logits.rowwise().sum();

  // dL/dh_t per element, injected at its readout position.
  const Eigen::MatrixXd readout_grad = p.w_out.transpose() * d_logits;
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(p.hidden(), batch.size);
  Eigen::MatrixXd dpre(p.hidden(), batch.size);
  for (int t = T - 1; t >= 0; --t) {
    for (int b = 0; b < batch.size; ++b)
      if (batch.lengths[b] - 1 == t) dh.col(b) += readout_grad.col(b);
    const Eigen::MatrixXd& h_t = trace.h[static_cast<std::size_t>(t)];
    for (int b = 0; b < batch.size; ++b) {
      if (t < batch.lengths[b])
        dpre.col(b) = dh.col(b).array() * (1.0 - h_t.col(b).array().square());
      else
        dpre.col(b).setZero();
    }
    if (t > 0) {
      g.w_rec.noalias() += dpre * trace.h[static_cast<std::size_t>(t - 1)].transpose();
    }  // h_{-1} = 0 contributes nothing
    g.b_h += dpre.rowwise().sum();
    for (int b = 0; b < batch.size; ++b)
      if (t < batch.lengths[b]) g.w_in.col(batch.sym(b, t)) += dpre.col(b);
    dh = p.w_rec.transpose() * dpre;
  }

  if (l2_weight != 0.0) {
    g.w_in += 2.0 * l2_weight * p.w_in;
    g.w_rec += 2.0 * l2_weight * p.w_rec;
    g.w_out += 2.0 * l2_weight * p.w_out;
  }
  return g;
}

// Argmax labels; an exact logit tie resolves to 0.
inline std::vector<int> predict(const RnnParams& p, const Batch& batch) {
  const Eigen::MatrixXd logits = forward_logits(p, batch);
  std::vector<int> out(static_cast<std::size_t>(batch.size));
  for (int b = 0; b < batch.size; ++b)
    out[static_cast<std::size_t>(b)] = logits(1, b) > logits(0, b) ? 1 : 0;
  return out;
}

}  // namespace omegalab
