#pragma once

#include "topobohm/propagator.hpp"

namespace topobohm {

/// Dense Crank–Nicolson integrator for untwisted scalar ring states. The
/// Laplacian is the closed-form periodic spectral differentiation matrix, so
/// this shares no transform code with Propagator.
class CrankNicolson {
 public:
  CrankNicolson(int n, const std::vector<double>& v, double dt);
  void step(WaveGrid& state) const;
  void advance(WaveGrid& state, long long steps) const;

  /// Second-derivative matrix D₂ on n periodic points (n even).
  static Eigen::MatrixXd second_derivative(int n);

 private:
  int n_;
  CMatrix update_;  // (I + iH dt/2)⁻¹ (I − iH dt/2)
};

/// Ungauged reference: ψ itself (not χ) on `sheets` consecutive sheets of the
/// ring cover, second-order finite differences, Crank–Nicolson in time, and
/// the boundary identification ψ(θ + 2π·sheets) = Γ^{sheets} ψ(θ). The lifted
/// potential is applied as is, with no commutation check, so an incompatible
/// factor shows up as a growing twist residual.
class CoverSheetIntegrator {
 public:
  CoverSheetIntegrator(const WaveGrid& initial, const Potential& v, double dt, int sheets = 3);

  void step();
  /// max over neighbouring sheet pairs of |ψ(θ + 2π) − Γ₁ψ(θ)|.
  double twist_residual() const;
  double norm() const;

 private:
  int n_;
  int k_;
  int sheets_;
  double h_;
  CMatrix gamma_;
  CVector psi_;  // index ((s·n + j)·k + c)
  CMatrix update_;
};

}  // namespace topobohm
