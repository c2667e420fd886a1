#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <vector>

namespace topobohm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest absolute entry.
double max_abs(const CMatrix& m);

/// ‖U†U − I‖_max.
double unitarity_residual(const CMatrix& u);

/// ‖H − H†‖_max.
double hermiticity_residual(const CMatrix& h);

/// ‖AB − BA‖_max.
double commutator_norm(const CMatrix& a, const CMatrix& b);

/// True if m = c·I for some complex c, entrywise to `tol`.
bool is_scalar_multiple_of_identity(const CMatrix& m, double tol = 1e-12);

/// Spectral data of a normal matrix: m = basis · diag(e^{i phases}) · basis†
/// (for unitary input). `phases` lie in (−π, π].
struct UnitarySpectrum {
  CMatrix basis;
  std::vector<double> phases;
};

/// Eigendecomposition of a unitary matrix via the complex Schur form (which is
/// diagonal for normal input). Throws DomainError if the input is not unitary
/// to `tol`.
UnitarySpectrum unitary_spectrum(const CMatrix& u, double tol = 1e-10);

/// Γ^t = U diag(e^{i t φ_j}) U† with eigenphases φ_j in (−π, π].
CMatrix fractional_power(const UnitarySpectrum& spec, double t);
CMatrix fractional_power(const CMatrix& u, double t);

/// exp(−i·h·t) for Hermitian h via the symmetric eigensolver.
CMatrix expm_hermitian(const CMatrix& h, double t);

/// Integer power, negative exponents through the adjoint (unitary input).
CMatrix unitary_power(const CMatrix& u, long long k);

/// Principal branch argument mapped into (−π, π].
double wrap_phase(double phi);

CMatrix kron(const CMatrix& a, const CMatrix& b);

namespace pauli {
CMatrix x();
CMatrix y();
CMatrix z();
/// e·σ for a (not necessarily normalized) axis e.
CMatrix dot(const Eigen::Vector3d& e);
}  // namespace pauli

/// exp(−i·angle·e·σ), e normalized internally.
CMatrix spin_rotation(const Eigen::Vector3d& axis, double angle);

}  // namespace topobohm
