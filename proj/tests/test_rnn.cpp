#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "omegalab/fixtures.hpp"
#include "omegalab/rng.hpp"
#include "omegalab/rnn.hpp"
#include "omegalab/sampling.hpp"

using namespace omegalab;

namespace {

// Objective used by the finite-difference oracle: data loss plus the same
// L2 term backward() differentiates.
double objective(const RnnParams& p, const Batch& batch, double l2) {
  const Eigen::MatrixXd logits = forward_logits(p, batch);
  return cross_entropy(logits, batch.labels).value + l2 * weight_squared_sum(p);
}

double relative_error(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Central finite differences over every coordinate of every tensor.
double max_gradient_error(RnnParams p, const Batch& batch, double l2) {
  const ForwardResult fwd = forward(p, batch);
  const LossResult loss = cross_entropy(fwd.logits, batch.labels);
  const RnnParams grads = backward(p, fwd.trace, loss.d_logits, l2);
  const double h = 1e-5;
  double worst = 0.0;

  auto check_tensor = [&](Eigen::MatrixXd& theta, const Eigen::MatrixXd& g) {
    for (Eigen::Index r = 0; r < theta.rows(); ++r)
      for (Eigen::Index c = 0; c < theta.cols(); ++c) {
        const double saved = theta(r, c);
        theta(r, c) = saved + h;
        const double up = objective(p, batch, l2);
        theta(r, c) = saved - h;
        const double down = objective(p, batch, l2);
        theta(r, c) = saved;
        worst = std::max(worst, relative_error((up - down) / (2 * h), g(r, c)));
      }
  };
  auto check_vector = [&](Eigen::VectorXd& theta, const Eigen::VectorXd& g) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double saved = theta(i);
      theta(i) = saved + h;
      const double up = objective(p, batch, l2);
      theta(i) = saved - h;
      const double down = objective(p, batch, l2);
      theta(i) = saved;
      worst = std::max(worst, relative_error((up - down) / (2 * h), g(i)));
    }
  };
  check_tensor(p.w_in, grads.w_in);
  check_tensor(p.w_rec, grads.w_rec);
  check_vector(p.b_h, grads.b_h);
  check_tensor(p.w_out, grads.w_out);
  check_vector(p.b_out, grads.b_out);
  return worst;
}

Batch random_batch(int alphabet_size, int batch, int max_len, std::uint64_t seed) {
  Rng rng(seed);
  Batch out;
  out.size = batch;
  out.max_len = max_len;
  out.syms.assign(static_cast<std::size_t>(batch) * max_len, 0);
  out.lengths.resize(static_cast<std::size_t>(batch));
  out.labels.resize(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
    out.lengths[static_cast<std::size_t>(b)] = len;
    out.labels[static_cast<std::size_t>(b)] = static_cast<int>(rng.below(2));
    for (int t = 0; t < len; ++t)
      out.syms[static_cast<std::size_t>(b) * max_len + t] =
          static_cast<Symbol>(rng.below(static_cast<std::uint64_t>(alphabet_size)));
  }
  return out;
}

}  // namespace

TEST_CASE("init_params") {
  SECTION("deterministic given the seed") {
    const RnnParams a = init_params(5, 8, 123);
    const RnnParams b = init_params(5, 8, 123);
    REQUIRE(a.w_in == b.w_in);
    REQUIRE(a.w_rec == b.w_rec);
    REQUIRE(a.w_out == b.w_out);
    const RnnParams c = init_params(5, 8, 124);
    REQUIRE(a.w_in != c.w_in);
  }

  SECTION("biases start at zero") {
    const RnnParams p = init_params(5, 8, 1);
    REQUIRE(p.b_h.isZero(0));
    REQUIRE(p.b_out.isZero(0));
  }

  SECTION("entries respect the per-matrix bounds over ~1e6 draws") {
    const double in_bound = std::sqrt(6.0 / (5 + 8));
    const double rec_bound = std::sqrt(6.0 / (8 + 8));
    const double out_bound = std::sqrt(6.0 / (8 + 2));
    for (std::uint64_t seed = 0; seed < 8500; ++seed) {
      const RnnParams p = init_params(5, 8, seed);
      REQUIRE(p.w_in.cwiseAbs().maxCoeff() < in_bound);
      REQUIRE(p.w_rec.cwiseAbs().maxCoeff() < rec_bound);
      REQUIRE(p.w_out.cwiseAbs().maxCoeff() < out_bound);
    }
  }
}

TEST_CASE("forward") {
  SECTION("all-zero parameters give even logits and ln 2 loss") {
    const RnnParams p = zero_params(3, 4);
    const Batch batch = random_batch(3, 6, 5, 42);
    const Eigen::MatrixXd logits = forward_logits(p, batch);
    REQUIRE(logits.isZero(0));
    const LossResult loss = cross_entropy(logits, batch.labels);
    REQUIRE(loss.value == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  }

  SECTION("hand-computed single step at hidden 2, alphabet 2") {
    RnnParams p = zero_params(2, 2);
    p.w_in(0, 0) = 0.5;
    p.w_in(1, 0) = -0.25;
    p.b_h << 0.1, 0.2;
    p.w_out << 1.0, 2.0, -1.0, 0.5;
    p.b_out << 0.05, -0.05;
    Batch batch;
    batch.size = 1;
    batch.max_len = 1;
    batch.syms = {0};
    batch.lengths = {1};
    batch.labels = {1};
    const Eigen::MatrixXd logits = forward_logits(p, batch);
    const double h0 = std::tanh(0.5 + 0.1);
    const double h1 = std::tanh(-0.25 + 0.2);
    REQUIRE(logits(0, 0) == Catch::Approx(1.0 * h0 + 2.0 * h1 + 0.05).epsilon(1e-12));
    REQUIRE(logits(1, 0) == Catch::Approx(-1.0 * h0 + 0.5 * h1 - 0.05).epsilon(1e-12));
  }

  SECTION("batch elements do not interact") {
    const RnnParams p = init_params(4, 6, 7);
    Batch ab = random_batch(4, 2, 6, 8);
    Batch ba = ab;
    // Swap the two elements.
    for (int t = 0; t < ab.max_len; ++t)
      std::swap(ba.syms[static_cast<std::size_t>(0) * ab.max_len + t],
                ba.syms[static_cast<std::size_t>(1) * ab.max_len + t]);
    std::swap(ba.lengths[0], ba.lengths[1]);
    std::swap(ba.labels[0], ba.labels[1]);
    const Eigen::MatrixXd la = forward_logits(p, ab);
    const Eigen::MatrixXd lb = forward_logits(p, ba);
    REQUIRE(la.col(0) == lb.col(1));
    REQUIRE(la.col(1) == lb.col(0));
  }

  SECTION("trace hidden states stay inside the tanh range") {
    const RnnParams p = init_params(4, 8, 77);
    const Batch batch = random_batch(4, 8, 10, 78);
    const ForwardResult fwd = forward(p, batch);
    for (const auto& h : fwd.trace.h) {
      REQUIRE((h.array() > -1.0).all());
      REQUIRE((h.array() < 1.0).all());
    }
  }

  SECTION("appending padded timesteps never changes logits") {
    const RnnParams p = init_params(5, 8, 9);
    const Dba fig1 = fixture("fig1");
    SamplerConfig cfg;
    const auto recs = sample_balanced_batch(fig1, 16, 2, 12, cfg, 10);
    const Batch tight = Batch::from_records(recs, fig1.alphabet());
    const Batch padded = Batch::from_records(recs, fig1.alphabet(), tight.max_len + 7);
    const Eigen::MatrixXd a = forward_logits(p, tight);
    const Eigen::MatrixXd b = forward_logits(p, padded);
    REQUIRE(a == b);
  }
}

TEST_CASE("cross_entropy") {
  SECTION("saturated logits") {
    Eigen::MatrixXd logits(2, 1);
    logits << 20.0, -20.0;
    const std::vector<int> labels{0};
    REQUIRE(cross_entropy(logits, labels).value < 1e-8);
  }

  SECTION("d_logits columns sum to zero (softmax sums to one)") {
    Rng rng(11);
    Eigen::MatrixXd logits(2, 64);
    std::vector<int> labels(64);
    for (int b = 0; b < 64; ++b) {
      logits(0, b) = rng.uniform(-10, 10);
      logits(1, b) = rng.uniform(-10, 10);
      labels[static_cast<std::size_t>(b)] = static_cast<int>(rng.below(2));
    }
    const LossResult loss = cross_entropy(logits, labels);
    for (int b = 0; b < 64; ++b)
      REQUIRE(std::fabs(loss.d_logits(0, b) + loss.d_logits(1, b)) < 1e-12);
  }
}

TEST_CASE("backward") {
  SECTION("matches central finite differences on random configurations") {
    Rng rng(12);
    for (int trial = 0; trial < 12; ++trial) {
      const int alphabet = 2 + static_cast<int>(rng.below(4));  // up to 5
      const int hidden = 1 + static_cast<int>(rng.below(8));    // up to 8
      const int batch = 1 + static_cast<int>(rng.below(4));
      const int max_len = 1 + static_cast<int>(rng.below(12));
      const RnnParams p = init_params(alphabet, hidden, rng.next_u64());
      const Batch b = random_batch(alphabet, batch, max_len, rng.next_u64());
      const double l2 = trial % 2 ? 5e-4 : 0.0;
      const double err = max_gradient_error(p, b, l2);
      CAPTURE(trial, alphabet, hidden, batch, max_len, l2);
      REQUIRE(err < 1e-5);
    }
  }

  SECTION("zero d_logits leaves exactly the L2 term") {
    const RnnParams p = init_params(4, 6, 13);
    const Batch batch = random_batch(4, 3, 7, 14);
    const ForwardResult fwd = forward(p, batch);
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, batch.size);
    const double l2 = 5e-4;
    const RnnParams g = backward(p, fwd.trace, zero, l2);
    REQUIRE(g.w_in.isApprox(2 * l2 * p.w_in, 1e-15));
    REQUIRE(g.w_rec.isApprox(2 * l2 * p.w_rec, 1e-15));
    REQUIRE(g.w_out.isApprox(2 * l2 * p.w_out, 1e-15));
    REQUIRE(g.b_h.isZero(0));
    REQUIRE(g.b_out.isZero(0));
  }

  SECTION("padding does not perturb gradients") {
    const Dba fig1 = fixture("fig1");
    SamplerConfig cfg;
    const auto recs = sample_balanced_batch(fig1, 1, 4, 9, cfg, 15);
    const RnnParams p = init_params(static_cast<int>(fig1.alphabet().size()), 6, 16);
    const Batch tight = Batch::from_records(recs, fig1.alphabet());
    const Batch padded = Batch::from_records(recs, fig1.alphabet(), tight.max_len + 5);

    auto grads_of = [&](const Batch& b) {
      const ForwardResult fwd = forward(p, b);
      const LossResult loss = cross_entropy(fwd.logits, b.labels);
      return backward(p, fwd.trace, loss.d_logits, 5e-4);
    };
    const RnnParams ga = grads_of(tight);
    const RnnParams gb = grads_of(padded);
    REQUIRE(ga.w_in == gb.w_in);
    REQUIRE(ga.w_rec == gb.w_rec);
    REQUIRE(ga.b_h == gb.b_h);
    REQUIRE(ga.w_out == gb.w_out);
    REQUIRE(ga.b_out == gb.b_out);
  }
}

TEST_CASE("predict") {
  SECTION("zero params predict label 0 by the tie rule") {
    const RnnParams p = zero_params(3, 4);
    const Batch batch = random_batch(3, 10, 6, 17);
    for (int label : predict(p, batch)) REQUIRE(label == 0);
  }

  SECTION("biased output layer predicts label 1") {
    RnnParams p = zero_params(3, 4);
    p.b_out << -1.0, 4.0;
    const Batch batch = random_batch(3, 10, 6, 18);
    for (int label : predict(p, batch)) REQUIRE(label == 1);
  }

  SECTION("consistent with forward logits") {
    const RnnParams p = init_params(4, 8, 19);
    const Batch batch = random_batch(4, 32, 10, 20);
    const Eigen::MatrixXd logits = forward_logits(p, batch);
    const auto labels = predict(p, batch);
    for (int b = 0; b < batch.size; ++b)
      REQUIRE(labels[static_cast<std::size_t>(b)] ==
              (logits(1, b) > logits(0, b) ? 1 : 0));
  }
}

TEST_CASE("param_l2_norm") {
  SECTION("zero and single-entry cases") {
    RnnParams p = zero_params(3, 4);
    REQUIRE(param_l2_norm(p) == 0.0);
    p.w_rec(1, 2) = 3.0;
    REQUIRE(param_l2_norm(p) == 3.0);
  }

  SECTION("matches an independent sum of squares") {
    const RnnParams p = init_params(5, 7, 21);
    double ss = 0.0;
    for (Eigen::Index r = 0; r < p.w_in.rows(); ++r)
      for (Eigen::Index c = 0; c < p.w_in.cols(); ++c) ss += p.w_in(r, c) * p.w_in(r, c);
    for (Eigen::Index r = 0; r < p.w_rec.rows(); ++r)
      for (Eigen::Index c = 0; c < p.w_rec.cols(); ++c) ss += p.w_rec(r, c) * p.w_rec(r, c);
    for (Eigen::Index i = 0; i < p.b_h.size(); ++i) ss += p.b_h(i) * p.b_h(i);
    for (Eigen::Index r = 0; r < p.w_out.rows(); ++r)
      for (Eigen::Index c = 0; c < p.w_out.cols(); ++c) ss += p.w_out(r, c) * p.w_out(r, c);
    for (Eigen::Index i = 0; i < p.b_out.size(); ++i) ss += p.b_out(i) * p.b_out(i);
    REQUIRE(param_l2_norm(p) == Catch::Approx(std::sqrt(ss)).epsilon(1e-12));
  }
}
