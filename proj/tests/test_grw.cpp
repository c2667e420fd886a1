#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

#include "topobohm/errors.hpp"
#include "topobohm/grw.hpp"
#include "topobohm/states.hpp"

using namespace topobohm;

TEST_CASE("collapse profile uses the geodesic distance") {
  CHECK(collapse_profile(0.1, kTwoPi - 0.1, 0.3) == doctest::Approx(std::exp(-0.04 / (2 * 0.09))));
  CHECK(collapse_profile(0.0, kPi, INFINITY) == 1.0);
}

TEST_CASE("collapse rate for the uniform density") {
  const auto s = ring_eigenstate(256, 0, 0.7);
  const double a = 0.3, lambda = 2.0;
  const double expect = lambda * std::sqrt(kTwoPi) * a * boost::math::erf(kPi / (std::sqrt(2.0) * a)) / kTwoPi;
  CHECK(collapse_rate(s, 1.3, lambda, a) == doctest::Approx(expect).epsilon(1e-10));
  for (double r : collapse_rates(s, lambda, a)) CHECK(r == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("collapse localizes, renormalizes and keeps the twist") {
  const auto s = wrapped_gaussian(128, kPi, 1.5, 1.0, 2.0);
  const auto c = apply_collapse(s, 1.0, 1.0, 0.3);
  CHECK(c.norm() == doctest::Approx(1.0));
  CHECK(twist_residual(c) < 1e-12);
  // Density ratio follows the profile: ρ'(θ)/ρ(θ) ∝ f_x(θ).
  const int j1 = 20, j2 = 30;
  const double ratio = (c.density(j1) / s.density(j1)) / (c.density(j2) / s.density(j2));
  CHECK(ratio == doctest::Approx(collapse_profile(1.0, s.theta(j1), 0.3) / collapse_profile(1.0, s.theta(j2), 0.3)));

  const auto same = apply_collapse(s, 1.0, 1.0, INFINITY);
  for (int j = 0; j < 128; ++j) CHECK(std::abs(same.at(0, j) - s.at(0, j)) < 1e-14);
}

TEST_CASE("collapse of a fermion pair keeps antisymmetry") {
  const int n = 32;
  auto t = torus_pair(n, -1, 0.5, von_mises(n, 1.0, 1.0, 0, 0.5).chi, von_mises(n, 3.5, 1.0, 1, 0.5).chi);
  t = apply_collapse(t, 2.0, 1.0, 0.3);
  CHECK(exchange_residual(t) < 1e-14);
  CHECK(t.norm() == doctest::Approx(1.0));
  CHECK(collapse_rate(t, 2.0, 1.0, 0.3) > 0.0);
}

TEST_CASE("GRW runs are reproducible per seed") {
  const auto s = wrapped_gaussian(64, kPi, 0.5, 1.0, kPi);
  const GrwParams p{1.0, 0.3, false};
  const auto a = simulate_grw(s, Potential::zero(64), 0.01, 5.0, p, 123);
  const auto b = simulate_grw(s, Potential::zero(64), 0.01, 5.0, p, 123);
  REQUIRE(a.events.size() == b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].x == b.events[i].x);
    CHECK(a.events[i].post_norm == doctest::Approx(1.0));
  }
  CHECK(a.final_state.chi == b.final_state.chi);
  const auto none = simulate_grw(s, Potential::zero(64), 0.01, 5.0, {0.0, 0.3, false}, 1);
  CHECK(none.events.empty());
}

TEST_CASE("collapse events occur where the density is") {
  // A narrow packet that barely moves: centres cluster within a few a of it.
  const auto s = wrapped_gaussian(128, 2.0, 0.2, 0.0, 0.0);
  const auto run = simulate_grw(s, Potential::zero(128), 0.01, 20.0, {1.0, 0.3, false}, 5);
  REQUIRE(!run.events.empty());
  const auto& first = run.events.front();
  CHECK(std::abs(std::remainder(first.x - 2.0, kTwoPi)) < 1.5);
}
