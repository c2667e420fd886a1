#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "topobohm/covering.hpp"
#include "topobohm/propagator.hpp"

namespace topobohm {

inline constexpr double kDefaultNodeEpsilon = 1e-12;

struct VelocitySample {
  double velocity = 0.0;
  double density = 0.0;
  /// |ψ|² below ε_node·max|ψ|²: the velocity is undefined here.
  bool node = false;
};

/// Trigonometric interpolant of a ring state, for evaluating the guiding
/// field off the grid:
///   v(θ) = [Im(χ, ∂χ) + (χ, Kχ)] / (χ, χ) − eA,   Γ^{θ/2π} = e^{iKθ}.
class VelocityInterpolant {
 public:
  explicit VelocityInterpolant(const WaveGrid& state, double eps_node = kDefaultNodeEpsilon,
                               Backend backend = Backend::omp);

  void evaluate(std::span<const double> theta, std::span<VelocitySample> out) const;
  VelocitySample operator()(double theta) const;
  /// Largest grid density (reference for the node threshold).
  double max_density() const { return max_density_; }

 private:
  void finish(const SpectralPoint& p, VelocitySample& out) const;

  int n_;
  int k_;
  Backend backend_;
  std::vector<cplx> coeffs_;
  CMatrix generator_;  // K
  double vector_potential_;
  double node_threshold_;
  double max_density_;
};

/// Guiding field at the grid points.
std::vector<VelocitySample> velocity_field(const WaveGrid& state, double eps_node = kDefaultNodeEpsilon);

/// The cover-side field v̂ = Im(ψ, ∂ψ)/(ψ, ψ) − eA computed from ψ itself on
/// the given sheets (ψ = Γ^{θ/2π}χ, so each sheet uses different matrices).
SheetSamples cover_velocity(const WaveGrid& state, std::span<const long long> sheets);

enum class TrajectoryStatus { completed, halted_at_node, left_resolution };
std::string to_string(TrajectoryStatus s);

/// Samples of a Bohmian path. Coordinates are continuous (unwrapped) cover
/// coordinates: coords[i·dims + d]. Angle and winding follow from them.
struct Trajectory {
  int dims = 1;
  std::vector<double> times;
  std::vector<double> coords;
  TrajectoryStatus status = TrajectoryStatus::completed;
  /// Time at which the status was set (end time when completed).
  double status_time = 0.0;

  std::size_t size() const { return times.size(); }
  double coord(std::size_t i, int d = 0) const { return coords[i * static_cast<size_t>(dims) + static_cast<size_t>(d)]; }
  /// Base angle in [0, 2π).
  double angle(std::size_t i, int d = 0) const;
  /// Whole turns relative to the starting sheet.
  long long winding(std::size_t i, int d = 0) const;
};

struct TrajectoryOptions {
  double eps_node = kDefaultNodeEpsilon;
  /// Multiplies the guiding field; −1 gives the sign-flipped control.
  double velocity_scale = 1.0;
  /// Record every `record_stride`-th step (the final time is always kept).
  int record_stride = 1;
  Backend backend = Backend::omp;
};

/// Integrate dQ/dt = v^ψ(Q) for every start point in lockstep with the wave
/// function: RK4 in time, using ψ(t), ψ(t + dt/2) (an extra half step) and
/// ψ(t + dt), and spectral interpolation in space. A trajectory halts (status
/// recorded) where the interpolated density drops below ε_node·max.
std::vector<Trajectory> integrate_trajectories(const WaveGrid& initial, const Potential& v, std::span<const double> q0,
                                               double dt, double t_end, const TrajectoryOptions& options = {});
Trajectory integrate_trajectory(const WaveGrid& initial, const Potential& v, double q0, double dt, double t_end,
                                const TrajectoryOptions& options = {});

/// Same for two particles on the ring; each start point is (θ₁, θ₂).
std::vector<Trajectory> integrate_torus_trajectories(const TorusGrid& initial, const std::vector<double>& v,
                                                     std::span<const std::array<double, 2>> q0, double dt,
                                                     double t_end, const TrajectoryOptions& options = {});

/// Continuous lift starting from `q0_hat`, which must project to the first
/// sample. Throws DomainError on a mismatched start or a jump larger than π
/// between samples.
std::vector<RingPoint> lift_trajectory(const Trajectory& traj, const RingPoint& q0_hat);

}  // namespace topobohm
