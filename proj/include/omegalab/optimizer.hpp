#pragma once

// AMSGrad (the original formulation: no bias correction, running max of the
// second moment) plus the linear-warmup learning-rate schedule.

#include <cstdint>
#include <stdexcept>

#include "omegalab/rnn.hpp"

namespace omegalab {

struct AmsgradConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AmsgradState {
  RnnParams m;
  RnnParams v;
  RnnParams v_hat;
  long t = 0;
  AmsgradConfig cfg;

  static AmsgradState init(const RnnParams& shape, AmsgradConfig cfg = {}) {
    AmsgradState s;
    s.m = zeros_like(shape);
    s.v = zeros_like(shape);
    s.v_hat = zeros_like(shape);
    s.cfg = cfg;
    return s;
  }
};

//   m     <- b1 m + (1-b1) g
//   v     <- b2 v + (1-b2) g*g
//   v_hat <- max(v_hat, v)        (entrywise, nondecreasing)
//   theta <- theta - lr * m / (sqrt(v_hat) + eps)
inline void amsgrad_step(RnnParams& params, const RnnParams& grads, AmsgradState& state,
                         double lr) {
  const AmsgradConfig& c = state.cfg;
  auto update = [&](auto& theta, const auto& g, auto& m, auto& v, auto& vh) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v.array() + (1.0 - c.beta2) * g.array().square();
    vh = vh.array().max(v.array());
    theta.array() -= lr * m.array() / (vh.array().sqrt() + c.epsilon);
  };
  update(params.w_in, grads.w_in, state.m.w_in, state.v.w_in, state.v_hat.w_in);
  update(params.w_rec, grads.w_rec, state.m.w_rec, state.v.w_rec, state.v_hat.w_rec);
  update(params.b_h, grads.b_h, state.m.b_h, state.v.b_h, state.v_hat.b_h);
  update(params.w_out, grads.w_out, state.m.w_out, state.v.w_out, state.v_hat.w_out);
  update(params.b_out, grads.b_out, state.m.b_out, state.v.b_out, state.v_hat.b_out);
  state.t += 1;
}

struct TrainConfig {
  int hidden = 256;
  int batch = 256;
  long steps = 100000;
  double lr_peak = 1e-3;
  double lr_start = 1e-8;
  double warmup_fraction = 0.2;
  double l2_weight = 5e-4;
  int train_min_len = 2;
  int train_max_len = 64;
  std::uint64_t seed = 0;
  AmsgradConfig optimizer;

  void check() const {
    if (hidden < 1 || batch < 1 || steps < 1)
      throw std::invalid_argument("train: hidden, batch, steps >= 1");
    if (!(warmup_fraction > 0.0 && warmup_fraction <= 1.0))
      throw std::invalid_argument("train: warmup_fraction in (0,1]");
    if (lr_peak <= 0.0 || lr_start <= 0.0 || l2_weight < 0.0)
      throw std::invalid_argument("train: rates must be positive");
    if (train_min_len < 2 || train_min_len > train_max_len)
      throw std::invalid_argument("train: need 2 <= train_min_len <= train_max_len");
  }
};

// Linear from lr_start at step 0 to lr_peak at floor(warmup_fraction*steps),
// constant afterwards. Endpoints are exact.
inline double lr_at(long step, const TrainConfig& cfg) {
  const long warmup = static_cast<long>(cfg.warmup_fraction * cfg.steps);
  if (step >= warmup || warmup == 0) return cfg.lr_peak;
  return cfg.lr_start +
         (cfg.lr_peak - cfg.lr_start) * (static_cast<double>(step) / warmup);
}

}  // namespace omegalab
