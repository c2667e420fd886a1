#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topobohm/bohm.hpp"
#include "topobohm/rng.hpp"

namespace topobohm {

/// Periodic density given by grid samples and linear interpolation between
/// neighbouring nodes (the last cell wraps to θ = 2π). Normalized on
/// construction.
class GridDensity {
 public:
  explicit GridDensity(std::vector<double> samples);
  static GridDensity of(const WaveGrid& state);

  int size() const { return static_cast<int>(rho_.size()); }
  /// Cumulative mass on [0, θ], θ ∈ [0, 2π].
  double cdf(double theta) const;
  /// Mass of [a, b] with 0 ≤ a ≤ b ≤ 2π.
  double mass(double a, double b) const { return cdf(b) - cdf(a); }
  /// Inverse of cdf by solving the quadratic in the containing cell.
  double quantile(double u) const;
  /// Equal-width bin masses.
  std::vector<double> bin_masses(int bins) const;

 private:
  std::vector<double> rho_;
  std::vector<double> cum_;  // mass of [0, θ_j]
  double h_;
};

/// i.i.d. draws from a grid density, deterministic per RNG state.
std::vector<double> sample_density(const GridDensity& density, int n, Rng& rng);
/// i.i.d. draws from |χ|² of a ring state (angles in [0, 2π)).
std::vector<double> sample_density(const WaveGrid& state, int n, std::uint64_t seed);

/// ½ Σ |p̂_b − p_b| over equal-width bins.
double total_variation(std::span<const double> angles, const GridDensity& density, int bins);
/// sup |F̂ − F| with the cut point at θ = 0.
double ks_distance(std::span<const double> angles, const GridDensity& density);

struct EquivarianceCheckpoint {
  double time = 0.0;
  double tv = 0.0;
  double ks = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct EnsembleReport {
  int n_samples = 0;
  std::uint64_t seed = 0;
  int bins = 64;
  std::vector<EquivarianceCheckpoint> checkpoints;
  double halted_fraction = 0.0;
  /// False when more than 1% of trajectories halted at nodes.
  bool valid = true;
  bool pass = false;
};

struct EquivarianceSetup {
  WaveGrid initial;
  Potential potential;
  double dt = 1e-3;
  TrajectoryOptions options;
  int bins = 64;
};

/// Sample ρ₀ = |ψ₀|², transport the ensemble along Bohmian trajectories and
/// compare with |ψ_t|² at each checkpoint time. A checkpoint passes when
/// TV ≤ 0.03 + 2√(bins/n).
EnsembleReport verify_equivariance(const EquivarianceSetup& setup, int n, std::span<const double> checkpoints,
                                   std::uint64_t seed);
/// Checkpoints at T·i/count, i = 1 … count.
EnsembleReport verify_equivariance(const EquivarianceSetup& setup, int n, double t_end, int count, std::uint64_t seed);

}  // namespace topobohm
