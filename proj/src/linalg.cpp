#include "topobohm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "topobohm/errors.hpp"

namespace topobohm {

double max_abs(const CMatrix& m) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
  return r;
}

double unitarity_residual(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols()));
}

double hermiticity_residual(const CMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(h - h.adjoint());
}

double commutator_norm(const CMatrix& a, const CMatrix& b) { return max_abs(a * b - b * a); }

bool is_scalar_multiple_of_identity(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const cplx c = m(0, 0);
  return max_abs(m - c * CMatrix::Identity(m.rows(), m.cols())) <= tol;
}

double wrap_phase(double phi) {
  double r = std::remainder(phi, kTwoPi);  // [−π, π]
  if (r <= -kPi + 1e-13) r = kPi;
  return r;
}

UnitarySpectrum unitary_spectrum(const CMatrix& u, double tol) {
  if (unitarity_residual(u) > tol) throw DomainError("unitary_spectrum: matrix is not unitary");
  Eigen::ComplexSchur<CMatrix> schur(u);
  const CMatrix& t = schur.matrixT();
  // Strictly upper part vanishes for normal input.
  double off = 0.0;
  for (Eigen::Index j = 0; j < t.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) off = std::max(off, std::abs(t(i, j)));
  if (off > tol) throw DomainError("unitary_spectrum: matrix is not normal");
  UnitarySpectrum out;
  out.basis = schur.matrixU();
  out.phases.resize(static_cast<size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) out.phases[static_cast<size_t>(i)] = wrap_phase(std::arg(t(i, i)));
  return out;
}

CMatrix fractional_power(const UnitarySpectrum& spec, double t) {
  const auto k = spec.basis.rows();
  CVector d(k);
  for (Eigen::Index i = 0; i < k; ++i) d(i) = std::polar(1.0, t * spec.phases[static_cast<size_t>(i)]);
  return spec.basis * d.asDiagonal() * spec.basis.adjoint();
}

CMatrix fractional_power(const CMatrix& u, double t) { return fractional_power(unitary_spectrum(u), t); }

CMatrix expm_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const auto& ev = es.eigenvalues();
  CVector d(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) d(i) = std::polar(1.0, -ev(i) * t);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix unitary_power(const CMatrix& u, long long k) {
  CMatrix base = k >= 0 ? CMatrix(u) : CMatrix(u.adjoint());
  unsigned long long e = static_cast<unsigned long long>(k >= 0 ? k : -k);
  CMatrix result = CMatrix::Identity(u.rows(), u.cols());
  while (e != 0) {
    if (e & 1ULL) result = result * base;
    e >>= 1ULL;
    if (e != 0) base = base * base;
  }
  return result;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace pauli {
CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
CMatrix y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
CMatrix dot(const Eigen::Vector3d& e) { return e(0) * x() + e(1) * y() + e(2) * z(); }
}  // namespace pauli

CMatrix spin_rotation(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) throw DomainError("spin_rotation: zero axis");
  const Eigen::Vector3d e = axis / n;
  // (e·σ)² = I, so exp(−iα e·σ) = cos α I − i sin α e·σ.
  return std::cos(angle) * CMatrix::Identity(2, 2) - cplx(0, std::sin(angle)) * pauli::dot(e);
}

}  // namespace topobohm
