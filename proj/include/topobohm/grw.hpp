#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "topobohm/propagator.hpp"

namespace topobohm {

struct GrwParams {
  double lambda = 1.0;
  /// Collapse width; +∞ gives the constant profile (Λ ∝ identity).
  double a = 0.3;
  bool allow_aperiodic = false;
};

/// exp(−d(x, θ)²/2a²) with the geodesic distance on the circle; 1 for a = ∞.
double collapse_profile(double x, double theta, double a);

/// r(x|ψ) = λ ∫ f_x(θ)|ψ(θ)|² dθ (one particle) and λ Σᵢ ∫ f_x(θᵢ)|ψ|² (two).
double collapse_rate(const WaveGrid& state, double x, double lambda, double a);
double collapse_rate(const TorusGrid& state, double x, double lambda, double a);

/// r(x|ψ) at the grid points x = θ_j.
std::vector<double> collapse_rates(const WaveGrid& state, double lambda, double a);
std::vector<double> collapse_rates(const TorusGrid& state, double lambda, double a);

/// Multiply by the square root of the (summed) profile without renormalizing.
void apply_sqrt_profile(WaveGrid& state, double x, double a);
void apply_sqrt_profile(TorusGrid& state, double x, double a);

/// ψ → Λ(x)^{1/2}ψ / ‖Λ(x)^{1/2}ψ‖. Throws DomainError when r(x|ψ) = 0.
WaveGrid apply_collapse(const WaveGrid& state, double x, double lambda, double a);
TorusGrid apply_collapse(const TorusGrid& state, double x, double lambda, double a);

struct CollapseEvent {
  double time = 0.0;
  double x = 0.0;
  double pre_norm = 0.0;
  /// ‖Λ(x)^{1/2}ψ‖/√λ before renormalization.
  double collapsed_norm = 0.0;
  double post_norm = 0.0;
  /// Particle label for distinguishable particles, −1 for identical ones.
  int label = -1;
  double twist_residual = 0.0;
};

struct GrwRun {
  std::vector<CollapseEvent> events;
  WaveGrid final_state;
  /// Thinning bound refreshes caused by a stale bound, with their times.
  std::vector<std::string> log;
  int candidates = 0;
};

/// Inhomogeneous Poisson process by thinning against a rate bound refreshed
/// every 100 propagator steps; between collapses the state follows the
/// split-step propagator. Centres are drawn from r(x|ψ)/∫r. Throws
/// ToleranceBreach if a collapse breaks the twist (unless allow_aperiodic).
GrwRun simulate_grw(const WaveGrid& initial, const Potential& v, double dt, double t_end, const GrwParams& params,
                    std::uint64_t seed, Backend backend = Backend::omp);

}  // namespace topobohm
