#include "topobohm/reference.hpp"

#include <cmath>

#include "topobohm/errors.hpp"

namespace topobohm {

Eigen::MatrixXd CrankNicolson::second_derivative(int n) {
  if (n < 4 || n % 2 != 0) throw DomainError("spectral differentiation needs an even grid");
  const double h = kTwoPi / n;
  Eigen::MatrixXd d(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      if (j == l) {
        d(j, l) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin(0.5 * h * (j - l));
        d(j, l) = -0.5 * ((j - l) % 2 == 0 ? 1.0 : -1.0) / (s * s);
      }
    }
  return d;
}

CrankNicolson::CrankNicolson(int n, const std::vector<double>& v, double dt) : n_(n) {
  if (static_cast<int>(v.size()) != n) throw DomainError("potential size does not match the grid");
  Eigen::MatrixXd h = -0.5 * second_derivative(n);
  for (int j = 0; j < n; ++j) h(j, j) += v[static_cast<size_t>(j)];
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a = id + cplx(0.0, 0.5 * dt) * h.cast<cplx>();
  const CMatrix b = id - cplx(0.0, 0.5 * dt) * h.cast<cplx>();
  update_ = a.partialPivLu().solve(b);
}

void CrankNicolson::step(WaveGrid& s) const {
  if (s.n != n_ || s.components != 1 || !s.factor.is_trivial() || s.vector_potential != 0.0)
    throw DomainError("Crank-Nicolson reference handles untwisted scalar states only");
  const CVector x = update_ * Eigen::Map<const CVector>(s.chi.data(), n_);
  Eigen::Map<CVector>(s.chi.data(), n_) = x;
}

void CrankNicolson::advance(WaveGrid& s, long long steps) const {
  for (long long i = 0; i < steps; ++i) step(s);
}

CoverSheetIntegrator::CoverSheetIntegrator(const WaveGrid& initial, const Potential& v, double dt, int sheets)
    : n_(initial.n), k_(initial.components), sheets_(sheets), h_(initial.dtheta()),
      gamma_(initial.factor.generator_matrices().front()) {
  if (sheets < 2) throw DomainError("the cover-sheet reference needs at least two sheets");
  if (v.size() != n_ || v.components != k_) throw DomainError("potential does not match the state");
  const Eigen::Index dim = static_cast<Eigen::Index>(sheets) * n_ * k_;
  psi_.resize(dim);
  for (int s = 0; s < sheets; ++s) {
    const auto sheet = reconstruct_sheet(initial, s);
    for (int j = 0; j < n_; ++j)
      for (int c = 0; c < k_; ++c)
        psi_((static_cast<Eigen::Index>(s) * n_ + j) * k_ + c) = sheet[static_cast<size_t>(c) * static_cast<size_t>(n_) + static_cast<size_t>(j)];
  }
  const int points = sheets * n_;
  const CMatrix wrap = unitary_power(gamma_, sheets);
  CMatrix h = CMatrix::Zero(dim, dim);
  const double t = 0.5 / (h_ * h_);
  for (int p = 0; p < points; ++p) {
    const CMatrix vp = v.sample(p % n_);
    for (int c = 0; c < k_; ++c) {
      h(p * k_ + c, p * k_ + c) += 2.0 * t;
      for (int d = 0; d < k_; ++d) h(p * k_ + c, p * k_ + d) += vp(c, d);
    }
    // Right neighbour; across the window edge it is Γ^S times the first point.
    if (p + 1 < points) {
      for (int c = 0; c < k_; ++c) h(p * k_ + c, (p + 1) * k_ + c) -= t;
    } else {
      for (int c = 0; c < k_; ++c)
        for (int d = 0; d < k_; ++d) h(p * k_ + c, d) -= t * wrap(c, d);
    }
    if (p > 0) {
      for (int c = 0; c < k_; ++c) h(p * k_ + c, (p - 1) * k_ + c) -= t;
    } else {
      const CMatrix inv = wrap.adjoint();
      for (int c = 0; c < k_; ++c)
        for (int d = 0; d < k_; ++d) h(c, (points - 1) * k_ + d) -= t * inv(c, d);
    }
  }
  const CMatrix id = CMatrix::Identity(dim, dim);
  update_ = (id + cplx(0.0, 0.5 * dt) * h).partialPivLu().solve(id - cplx(0.0, 0.5 * dt) * h);
}

void CoverSheetIntegrator::step() { psi_ = update_ * psi_; }

double CoverSheetIntegrator::twist_residual() const {
  double r = 0.0;
  for (int s = 0; s + 1 < sheets_; ++s)
    for (int j = 0; j < n_; ++j) {
      const auto lo = psi_.segment((static_cast<Eigen::Index>(s) * n_ + j) * k_, k_);
      const auto hi = psi_.segment((static_cast<Eigen::Index>(s + 1) * n_ + j) * k_, k_);
      r = std::max(r, (hi - gamma_ * lo).cwiseAbs().maxCoeff());
    }
  return r;
}

double CoverSheetIntegrator::norm() const { return std::sqrt(psi_.squaredNorm() * h_ / sheets_); }

}  // namespace topobohm
