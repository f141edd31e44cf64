#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omegalab/optimizer.hpp"
#include "omegalab/rng.hpp"

using namespace omegalab;

TEST_CASE("lr_at") {
  TrainConfig cfg;
  cfg.steps = 100000;
  cfg.lr_start = 1e-8;
  cfg.lr_peak = 1e-3;
  cfg.warmup_fraction = 0.2;

  SECTION("endpoints are exact") {
    REQUIRE(lr_at(0, cfg) == 1e-8);
    REQUIRE(lr_at(20000, cfg) == 1e-3);
    REQUIRE(lr_at(cfg.steps, cfg) == 1e-3);
  }

  SECTION("midpoint of the warmup is the average of the endpoints") {
    REQUIRE(lr_at(10000, cfg) ==
            Catch::Approx(0.5 * (1e-8 + 1e-3)).epsilon(1e-12));
  }

  SECTION("monotone during warmup, constant after") {
    double prev = 0.0;
    for (long s = 0; s <= 20000; s += 500) {
      const double lr = lr_at(s, cfg);
      REQUIRE(lr >= prev);
      prev = lr;
    }
    for (long s = 20000; s <= cfg.steps; s += 5000) REQUIRE(lr_at(s, cfg) == 1e-3);
  }
}

TEST_CASE("amsgrad_step") {
  SECTION("hand-derived first scalar step") {
    RnnParams p = zero_params(1, 1);  // five tensors; exercise w_rec's single entry
    AmsgradState state = AmsgradState::init(p);
    RnnParams g = zeros_like(p);
    g.w_rec(0, 0) = 1.0;
    amsgrad_step(p, g, state, 1e-3);
    // m = 0.1, v = 0.001, v_hat = 0.001
    const double expected = -1e-3 * 0.1 / (std::sqrt(0.001) + 1e-8);
    REQUIRE(p.w_rec(0, 0) == Catch::Approx(expected).epsilon(1e-12));
    REQUIRE(p.w_rec(0, 0) == Catch::Approx(-3.16228e-3).epsilon(1e-5));
    REQUIRE(state.t == 1);
  }

  SECTION("zero gradients leave parameters untouched") {
    RnnParams p = init_params(3, 4, 1);
    const RnnParams before = p;
    AmsgradState state = AmsgradState::init(p);
    const RnnParams g = zeros_like(p);
    for (int i = 0; i < 50; ++i) amsgrad_step(p, g, state, 1e-3);
    REQUIRE(p.w_in == before.w_in);
    REQUIRE(p.w_rec == before.w_rec);
    REQUIRE(p.b_h == before.b_h);
    REQUIRE(p.w_out == before.w_out);
    REQUIRE(p.b_out == before.b_out);
  }

  SECTION("v_hat is entrywise nondecreasing over random steps") {
    RnnParams p = init_params(3, 4, 2);
    AmsgradState state = AmsgradState::init(p);
    Rng rng(3);
    for (int step = 0; step < 1000; ++step) {
      RnnParams g = zeros_like(p);
      g.for_each_tensor([&rng](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i)
          *(t.data() + i) = rng.uniform(-2.0, 2.0);
      });
      RnnParams prev_v_hat = state.v_hat;
      amsgrad_step(p, g, state, 1e-3);
      REQUIRE((state.v_hat.w_in.array() >= prev_v_hat.w_in.array()).all());
      REQUIRE((state.v_hat.w_rec.array() >= prev_v_hat.w_rec.array()).all());
      REQUIRE((state.v_hat.b_h.array() >= prev_v_hat.b_h.array()).all());
      REQUIRE((state.v_hat.w_out.array() >= prev_v_hat.w_out.array()).all());
      REQUIRE((state.v_hat.b_out.array() >= prev_v_hat.b_out.array()).all());
    }
    REQUIRE(state.t == 1000);
  }

  SECTION("parameters stay finite under aggressive steps") {
    RnnParams p = init_params(4, 8, 4);
    AmsgradState state = AmsgradState::init(p);
    Rng rng(5);
    for (int step = 0; step < 200; ++step) {
      RnnParams g = zeros_like(p);
      g.for_each_tensor([&rng](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i)
          *(t.data() + i) = rng.uniform(-100.0, 100.0);
      });
      amsgrad_step(p, g, state, 0.1);
      REQUIRE(p.all_finite());
    }
  }
}
