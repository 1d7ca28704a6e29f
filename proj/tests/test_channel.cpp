#include <catch_amalgamated.hpp>

#include "qcorr/channel.hpp"
#include "test_support.hpp"

using namespace qcorr;
using linalg::CMatrix4;

TEST_CASE("decay_factor", "[channel]") {
  CHECK(decay_factor(0.0) == 1.0);
  CHECK(decay_factor(2.0) == Catch::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(decay_factor(1.0, ChannelParams::make(4.0)) == Catch::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(decay_factor(200.0) < 1e-40);
  CHECK(decay_factor(1.0) < decay_factor(0.5));
  CHECK_THROWS_AS(decay_factor(-1.0), DomainError);
  CHECK_THROWS_AS(ChannelParams::make(0.0), DomainError);
  CHECK_THROWS_AS(decay_factor(1.0, ChannelParams{-1.0}), DomainError);
}

TEST_CASE("apply_dephasing: elementwise damping pattern", "[channel]") {
  testing::Engine rng(21);
  const auto rho = testing::random_density(rng);
  const double t = 0.7;
  const double g = decay_factor(t);
  const auto out = apply_dephasing(rho, t);

  // Populations and the {|01>, |10>} block are untouched.
  for (std::size_t i = 0; i < 4; ++i) CHECK(out(i, i) == rho(i, i));
  CHECK(out(1, 2) == rho(1, 2));
  CHECK(out(2, 1) == rho(2, 1));
  // Single-flip coherences scale with gamma, the |00><11| coherence with gamma^4.
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 3}, {2, 3}}) {
    CHECK(std::abs(out(i, j) - rho(i, j) * g) <= 1e-16);
    CHECK(std::abs(out(j, i) - rho(j, i) * g) <= 1e-16);
  }
  CHECK(std::abs(out(0, 3) - rho(0, 3) * std::pow(g, 4)) <= 1e-16);
  CHECK(std::abs(out(3, 0) - rho(3, 0) * std::pow(g, 4)) <= 1e-16);
}

TEST_CASE("apply_dephasing: diagonal states are fixed", "[channel]") {
  const auto rho = validate_density(CMatrix4::diagonal({0.1, 0.2, 0.3, 0.4}));
  CHECK(apply_dephasing(rho, 3.0) == rho);
}

TEST_CASE("apply_dephasing: trace, PSD and semigroup", "[channel][property]") {
  testing::Engine rng(22);
  std::uniform_real_distribution<double> time(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = testing::random_density(rng);
    const double t1 = time(rng);
    const double t2 = time(rng);
    const auto a = apply_dephasing(rho, t1);
    CHECK(a.matrix().trace() == rho.matrix().trace());
    CHECK(linalg::hermitian_eig(a.matrix()).eigenvalues[0] >= -1e-10);
    const auto ab = apply_dephasing(a, t2);
    CHECK(linalg::max_abs_diff(ab.matrix(), apply_dephasing(rho, t1 + t2).matrix()) <= 1e-12);
  }
}

TEST_CASE("evolve_params: family flow", "[channel]") {
  const auto late = evolve_params({0.15, 0.12}, 60.0);
  CHECK(late.r == 0.15);
  CHECK(std::abs(late.s) < 1e-50);

  for (double t : {0.0, 1.0, 10.0}) CHECK(evolve_params({0.3, 0.0}, t) == XStateParams{0.3, 0.0});

  // r + s(t) = 1/2 at t = -ln(0.18 / 0.3) / 2.
  const auto at = evolve_params({0.32, 0.3}, 0.25541281188299536);
  CHECK(at.r == 0.32);
  CHECK(at.s == Catch::Approx(0.18).epsilon(1e-14));

  CHECK_THROWS_AS(evolve_params({0.2, 0.3}, 1.0), InvalidParamsError);
}

TEST_CASE("family closure under the channel", "[channel][property]") {
  testing::Engine rng(23);
  std::uniform_real_distribution<double> time(0.0, 8.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testing::random_params(rng);
    const double t = time(rng);
    const auto evolved = apply_dephasing(build_xstate(p), t);
    const auto q = evolve_params(p, t);
    CHECK(linalg::max_abs_diff(evolved.matrix(), build_xstate(q).matrix()) < 1e-12);
    CHECK(std::abs(q.s) <= std::abs(p.s));
    CHECK(q.is_physical());
  }
}

TEST_CASE("monte_carlo_evolve: t = 0 is exact", "[channel][mc]") {
  testing::Engine rng(24);
  const auto rho = testing::random_density(rng);
  const auto mc = monte_carlo_evolve(rho, 0.0, {}, {.n_samples = 5000, .seed = 1});
  CHECK(mc.mean == rho);
  CHECK(mc.max_abs_error_estimate == 0.0);
}

TEST_CASE("monte_carlo_evolve: rho_01,10 is untouched in every realization", "[channel][mc]") {
  testing::Engine rng(25);
  const auto rho = testing::random_density(rng);
  const auto mc = monte_carlo_evolve(rho, 1.3, {}, {.n_samples = 5000, .seed = 2});
  CHECK(mc.mean(1, 2) == rho(1, 2));
  CHECK(mc.error_bound(1, 2) == 0.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(mc.mean(i, i) == rho(i, i));
}

TEST_CASE("monte_carlo_evolve: gamma^4 on the Bell coherence at Gamma t = 1", "[channel][mc]") {
  const auto rho = build_xstate(0.5, 0.5);  // rho_14 = 1/2
  const auto mc = monte_carlo_evolve(rho, 1.0, {}, {.n_samples = 100000, .seed = 3});
  const double expected = 0.5 * std::exp(-2.0);
  CHECK(std::abs(mc.mean(0, 3).real() - expected) <= mc.error_bound(0, 3));
  CHECK(mc.error_bound(0, 3) < 0.01);
}

TEST_CASE("monte_carlo_evolve: independent of worker count, reproducible by seed", "[channel][mc]") {
  testing::Engine rng(26);
  const auto rho = testing::random_density(rng);
  NoiseSampleConfig cfg{.n_samples = 20000, .seed = 99, .workers = 1};
  const auto one = monte_carlo_evolve(rho, 0.8, {}, cfg);
  cfg.workers = 3;
  const auto three = monte_carlo_evolve(rho, 0.8, {}, cfg);
  CHECK(one.mean == three.mean);
  CHECK(one.error_bound == three.error_bound);

  cfg.seed = 100;
  const auto other = monte_carlo_evolve(rho, 0.8, {}, cfg);
  CHECK_FALSE(other.mean == one.mean);
}

TEST_CASE("monte_carlo_evolve: path-discretized phases agree with the analytic map", "[channel][mc]") {
  testing::Engine rng(27);
  const auto rho = testing::random_density(rng);
  const ChannelParams ch = ChannelParams::make(2.0);
  const NoiseSampleConfig cfg{.n_samples = 50000, .seed = 5, .sampling = PhaseSampling::PathDiscretized,
                              .path_steps = 32};
  const auto mc = monte_carlo_evolve(rho, 0.4, ch, cfg);
  CHECK(linalg::max_abs_diff(mc.mean.matrix(), apply_dephasing(rho, 0.4, ch).matrix()) <=
        mc.max_abs_error_estimate);
}

TEST_CASE("monte_carlo_evolve: rejects bad input", "[channel][mc]") {
  const auto rho = build_xstate(0.2, 0.1);
  CHECK_THROWS_AS(monte_carlo_evolve(rho, -1.0, {}, {}), DomainError);
  CHECK_THROWS_AS(monte_carlo_evolve(rho, 1.0, {}, {.n_samples = 0}), DomainError);
}
