#include <doctest.h>

#include <cmath>

#include "topobohm/ensemble.hpp"
#include "topobohm/states.hpp"

using namespace topobohm;

TEST_CASE("grid density: uniform CDF and exact quantiles") {
  const GridDensity u(std::vector<double>(16, 3.0));
  CHECK(u.cdf(kPi) == doctest::Approx(0.5));
  CHECK(u.cdf(kTwoPi) == doctest::Approx(1.0));
  CHECK(u.quantile(0.25) == doctest::Approx(kPi / 2));

  // Linear ramp between two nodes: ρ(θ) ∝ piecewise linear; cdf∘quantile = id.
  const GridDensity r({1.0, 4.0, 0.5, 2.0});
  for (double p : {0.01, 0.3, 0.5, 0.77, 0.999}) CHECK(r.cdf(r.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  double total = 0.0;
  for (double m : r.bin_masses(7)) total += m;
  CHECK(total == doctest::Approx(1.0));
  // Cell [0, π/2] has mean density (1+4)/2 of total mean (1+4+.5+2)/4·… : mass = 2.5/7.5.
  CHECK(r.mass(0.0, kPi / 2) == doctest::Approx(2.5 / 7.5));
}

TEST_CASE("sampling is deterministic and matches the density") {
  const auto s = wrapped_gaussian(128, 2.0, 0.5, 0.0, 0.0);
  const auto a = sample_density(s, 20000, 9);
  const auto b = sample_density(s, 20000, 9);
  CHECK(a == b);
  const GridDensity rho = GridDensity::of(s);
  CHECK(total_variation(a, rho, 32) < 0.03 + 2 * std::sqrt(32.0 / 20000));
  // KS for n samples: the 99.9% quantile of √n·D is about 1.95.
  CHECK(ks_distance(a, rho) < 1.95 / std::sqrt(20000.0));
}

TEST_CASE("TV and KS of a point mass against the uniform density") {
  const GridDensity u(std::vector<double>(64, 1.0));
  const std::vector<double> pts(100, kPi + 0.01);
  CHECK(total_variation(pts, u, 4) == doctest::Approx(0.75));
  CHECK(ks_distance(pts, u) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("stationary states are equivariant; the report is reproducible") {
  EquivarianceSetup setup{ring_eigenstate(64, 1, 0.3), Potential::zero(64), 0.01, {}, 16};
  std::vector<cplx> chi(64);
  for (int j = 0; j < 64; ++j) chi[static_cast<size_t>(j)] = 1.0 + 0.6 * std::polar(1.0, kTwoPi * j / 64);
  setup.initial = twist_embed(chi, ring_character(0.3));
  const auto a = verify_equivariance(setup, 2000, 0.5, 2, 17);
  const auto b = verify_equivariance(setup, 2000, 0.5, 2, 17);
  REQUIRE(a.checkpoints.size() == 2);
  CHECK(a.checkpoints[1].time == doctest::Approx(0.5));
  CHECK(a.pass);
  CHECK(a.valid);
  CHECK(a.checkpoints[0].threshold == doctest::Approx(0.03 + 2 * std::sqrt(16.0 / 2000)));
  CHECK(a.checkpoints[1].tv == b.checkpoints[1].tv);
}
