#include "topobohm/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "topobohm/errors.hpp"

namespace topobohm {

namespace {

void require_ring(const MatrixRep& factor) {
  if (factor.group().kind() != DeckGroupKind::Integers)
    throw DomainError("ring states need a factor on the deck group Z, got " + factor.group().describe());
}

void require_grid(int n) {
  if (n < 4 || (n & (n - 1)) != 0) throw DomainError("grid size must be a power of two >= 4, got " + std::to_string(n));
}

void normalize(std::vector<cplx>& v, double dtheta) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  s *= dtheta;
  if (!(s > 0.0)) throw DomainError("cannot normalize a zero wave function");
  const double f = 1.0 / std::sqrt(s);
  for (auto& z : v) z *= f;
}

/// Signed wavenumber with the shift applied, for the kinetic symbol.
inline double shifted(int m, int n, double shift) { return wavenumber(m, n) + shift; }

}  // namespace

// ----------------------------------------------------------------- WaveGrid

CVector WaveGrid::spinor(int j) const {
  CVector v(components);
  for (int c = 0; c < components; ++c) v(c) = at(c, j);
  return v;
}

double WaveGrid::density(int j) const {
  double s = 0.0;
  for (int c = 0; c < components; ++c) s += std::norm(at(c, j));
  return s;
}

double WaveGrid::norm() const {
  double s = 0.0;
  for (const auto& z : chi) s += std::norm(z);
  return std::sqrt(s * dtheta());
}

UnitarySpectrum WaveGrid::sectors() const { return unitary_spectrum(factor.generator_matrices().front()); }

WaveGrid twist_embed(std::vector<cplx> values, int components, const MatrixRep& factor, EmbedInput input) {
  require_ring(factor);
  if (components != factor.dimension())
    throw DomainError("state has " + std::to_string(components) + " components but the factor acts on dimension " +
                      std::to_string(factor.dimension()));
  if (values.size() % static_cast<size_t>(components) != 0) throw DomainError("sample count is not a multiple of the component count");
  const int n = static_cast<int>(values.size()) / components;
  require_grid(n);
  const auto spec = unitary_spectrum(factor.generator_matrices().front());
  WaveGrid g{n, components, std::move(values), factor, 0.0};
  if (input == EmbedInput::cover_sheet) {
    for (int j = 0; j < n; ++j) {
      const CVector chi = fractional_power(spec, -g.theta(j) / kTwoPi) * g.spinor(j);
      for (int c = 0; c < components; ++c) g.at(c, j) = chi(c);
    }
  }
  normalize(g.chi, g.dtheta());
  return g;
}

WaveGrid twist_embed(std::vector<cplx> values, const Character& factor, EmbedInput input) {
  return twist_embed(std::move(values), 1, scalar_rep(factor, 1), input);
}

std::vector<cplx> reconstruct_sheet(const WaveGrid& state, long long sheet) {
  const auto spec = state.sectors();
  std::vector<cplx> out(state.chi.size());
  const auto n = static_cast<size_t>(state.n);
  for (int j = 0; j < state.n; ++j) {
    const double t = static_cast<double>(sheet) + state.theta(j) / kTwoPi;
    const CVector psi = fractional_power(spec, t) * state.spinor(j);
    for (int c = 0; c < state.components; ++c) out[static_cast<size_t>(c) * n + static_cast<size_t>(j)] = psi(c);
  }
  return out;
}

double twist_residual(const WaveGrid& state) {
  const CMatrix& gamma = state.factor.generator_matrices().front();
  const auto n = static_cast<size_t>(state.n);
  double r = 0.0;
  auto lower = reconstruct_sheet(state, -1);
  for (long long s = 0; s <= 1; ++s) {
    auto upper = reconstruct_sheet(state, s);
    for (int j = 0; j < state.n; ++j)
      for (int c = 0; c < state.components; ++c) {
        cplx expected = 0.0;
        for (int d = 0; d < state.components; ++d) expected += gamma(c, d) * lower[static_cast<size_t>(d) * n + static_cast<size_t>(j)];
        r = std::max(r, std::abs(upper[static_cast<size_t>(c) * n + static_cast<size_t>(j)] - expected));
      }
    lower = std::move(upper);
  }
  return r;
}

// ---------------------------------------------------------------- Potential

Potential Potential::zero(int n, int components) { return from_scalar(std::vector<double>(static_cast<size_t>(n), 0.0), components); }

Potential Potential::from_scalar(std::vector<double> values, int components) {
  Potential v;
  v.components = components;
  v.scalar = std::move(values);
  return v;
}

Potential Potential::from_matrices(std::vector<CMatrix> values) {
  if (values.empty()) throw DomainError("matrix potential needs samples");
  Potential v;
  v.components = static_cast<int>(values.front().rows());
  v.matrix = std::move(values);
  return v;
}

Potential Potential::covariant_field(std::vector<CMatrix> v0) {
  Potential v = from_matrices(std::move(v0));
  v.covariant = true;
  return v;
}

CMatrix Potential::sample(int j) const {
  if (is_matrix()) return matrix[static_cast<size_t>(j)];
  return scalar[static_cast<size_t>(j)] * CMatrix::Identity(components, components);
}

double Potential::hermiticity_residual() const {
  double r = 0.0;
  for (const auto& m : matrix) r = std::max(r, topobohm::hermiticity_residual(m));
  return r;
}

std::vector<double> sample_grid(int n, const std::function<double(double)>& f) {
  std::vector<double> out(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = f(kTwoPi * j / n);
  return out;
}

void require_compatible(const MatrixRep& factor, const Potential& v, int n) {
  if (v.size() != n) throw DomainError("potential has " + std::to_string(v.size()) + " samples, grid has " + std::to_string(n));
  if (v.components != factor.dimension()) throw DomainError("potential and factor act on different component spaces");
  if (v.hermiticity_residual() > 1e-12) throw DomainError("potential is not Hermitian");
  if (!v.is_matrix() || v.covariant) return;
  std::vector<CMatrix> samples(v.matrix.begin(), v.matrix.end());
  if (!check_commutes(factor, samples))
    throw IncompatibleFactorError(
        "the topological factor does not commute with every V(q) (max commutator " +
        std::to_string(commutation_residual(factor, samples)) + "); the periodicity condition would not be preserved");
}

// --------------------------------------------------------------- Propagator

Propagator::Propagator(const WaveGrid& shape, const Potential& v, double dt, Backend backend)
    : n_(shape.n), k_(shape.components), dt_(dt), backend_(backend), factor_(shape.factor),
      vector_potential_(shape.vector_potential) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  require_ring(shape.factor);
  require_compatible(shape.factor, v, n_);
  const auto spec = shape.sectors();
  basis_ = spec.basis;
  sector_rotate_ = max_abs(basis_ - CMatrix::Identity(k_, k_)) > 0.0;
  const auto n = static_cast<size_t>(n_);
  kinetic_phase_.resize(static_cast<size_t>(k_) * n);
  for (int c = 0; c < k_; ++c) {
    const double shift = spec.phases[static_cast<size_t>(c)] / kTwoPi - vector_potential_;
    for (int m = 0; m < n_; ++m) {
      const double k = shifted(m, n_, shift);
      kinetic_phase_[static_cast<size_t>(c) * n + static_cast<size_t>(m)] = std::polar(1.0 / n_, -0.5 * k * k * dt);
    }
  }
  if (v.is_matrix()) {
    matrix_phase_.reserve(n);
    for (int j = 0; j < n_; ++j) matrix_phase_.push_back(expm_hermitian(v.matrix[static_cast<size_t>(j)], 0.5 * dt));
  } else {
    scalar_phase_.resize(n);
    for (int j = 0; j < n_; ++j) scalar_phase_[static_cast<size_t>(j)] = std::polar(1.0, -0.5 * dt * v.scalar[static_cast<size_t>(j)]);
  }
}

void Propagator::half_potential(WaveGrid& s) const {
  const auto n = static_cast<size_t>(n_);
  if (!scalar_phase_.empty()) {
    for (int c = 0; c < k_; ++c)
      multiply(std::span<cplx>(s.chi.data() + static_cast<size_t>(c) * n, n), scalar_phase_, backend_);
    return;
  }
  const bool par = backend_ == Backend::omp;
#pragma omp parallel for schedule(static) if (par)
  for (int j = 0; j < n_; ++j) {
    const CVector out = matrix_phase_[static_cast<size_t>(j)] * s.spinor(j);
    for (int c = 0; c < k_; ++c) s.at(c, j) = out(c);
  }
}

void Propagator::kinetic(WaveGrid& s) const {
  const bool par = backend_ == Backend::omp;
  if (sector_rotate_) {
    const CMatrix ud = basis_.adjoint();
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < n_; ++j) {
      const CVector out = ud * s.spinor(j);
      for (int c = 0; c < k_; ++c) s.at(c, j) = out(c);
    }
  }
  fft_rows(s.chi.data(), n_, k_, false, backend_);
  multiply(s.chi, kinetic_phase_, backend_);
  fft_rows(s.chi.data(), n_, k_, true, backend_);
  if (sector_rotate_) {
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < n_; ++j) {
      const CVector out = basis_ * s.spinor(j);
      for (int c = 0; c < k_; ++c) s.at(c, j) = out(c);
    }
  }
}

void Propagator::step(WaveGrid& s) const {
  if (s.n != n_ || s.components != k_) throw DomainError("state does not match the propagator grid");
  half_potential(s);
  kinetic(s);
  half_potential(s);
}

void Propagator::advance(WaveGrid& s, long long steps) const {
  for (long long i = 0; i < steps; ++i) step(s);
}

WaveGrid step_splitstep(const WaveGrid& state, const Potential& v, double dt, Backend backend) {
  WaveGrid out = state;
  Propagator(state, v, dt, backend).step(out);
  return out;
}

WaveGrid step_vector_potential(const WaveGrid& state, double a_const, double charge, const Potential& v, double dt,
                               Backend backend) {
  if (!state.factor.is_trivial()) throw DomainError("the vector-potential gauge works with untwisted states");
  WaveGrid out = state;
  out.vector_potential = charge * a_const;
  Propagator(out, v, dt, backend).step(out);
  return out;
}

WaveGrid with_vector_potential(WaveGrid state, double flux, double charge) {
  if (!state.factor.is_trivial()) throw DomainError("the vector-potential gauge works with untwisted states");
  state.vector_potential = charge * flux / kTwoPi;
  return state;
}

namespace {

/// Integer wavenumber shift m with β + eΦ = 2πm, β = wrap(−eΦ).
long long gauge_shift(double flux, double charge) {
  const double beta = wrap_phase(-charge * flux);
  return std::llround((beta + charge * flux) / kTwoPi);
}

}  // namespace

WaveGrid gauge_map(const WaveGrid& state_a, double flux, double charge) {
  if (!state_a.factor.is_trivial()) throw DomainError("gauge_map expects a state in the vector-potential gauge");
  if (std::abs(state_a.vector_potential - charge * flux / kTwoPi) > 1e-12)
    throw DomainError("state carries e*A = " + std::to_string(state_a.vector_potential) + ", flux implies " +
                      std::to_string(charge * flux / kTwoPi));
  const double beta = wrap_phase(-charge * flux);
  const long long m = gauge_shift(flux, charge);
  WaveGrid out = state_a;
  out.vector_potential = 0.0;
  const int k = state_a.components;
  out.factor = scalar_rep(ring_character(beta), k);
  for (int j = 0; j < out.n; ++j) {
    const cplx ph = std::polar(1.0, -static_cast<double>(m) * out.theta(j));
    for (int c = 0; c < k; ++c) out.at(c, j) *= ph;
  }
  return out;
}

WaveGrid gauge_map_inverse(const WaveGrid& twisted, double flux, double charge) {
  const cplx gamma = std::polar(1.0, wrap_phase(-charge * flux));
  const CMatrix& g = twisted.factor.generator_matrices().front();
  if (!is_scalar_multiple_of_identity(g, 1e-12) || std::abs(g(0, 0) - gamma) > 1e-12)
    throw DomainError("state twist does not match e^{-ie Phi}");
  const long long m = gauge_shift(flux, charge);
  WaveGrid out = twisted;
  out.factor = scalar_rep(ring_character(0.0), twisted.components);
  out.vector_potential = charge * flux / kTwoPi;
  for (int j = 0; j < out.n; ++j) {
    const cplx ph = std::polar(1.0, static_cast<double>(m) * out.theta(j));
    for (int c = 0; c < out.components; ++c) out.at(c, j) *= ph;
  }
  return out;
}

// ------------------------------------------------------------------ spectra

CMatrix hamiltonian_matrix(int n, const MatrixRep& factor, double vector_potential, const Potential& v) {
  require_ring(factor);
  require_grid(n);
  require_compatible(factor, v, n);
  const int k = factor.dimension();
  const auto spec = unitary_spectrum(factor.generator_matrices().front());
  const Eigen::Index dim = static_cast<Eigen::Index>(k) * n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int s = 0; s < k; ++s) {
    // Kernel T_s(d) = (1/n) Σ_m e^{i w_m·2πd/n} (w_m + shift)²/2 by inverse DFT.
    const double shift = spec.phases[static_cast<size_t>(s)] / kTwoPi - vector_potential;
    std::vector<cplx> kernel(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) {
      const double w = shifted(m, n, shift);
      kernel[static_cast<size_t>(m)] = 0.5 * w * w / n;
    }
    fft_rows(kernel.data(), n, 1, true, Backend::serial);
    const CMatrix proj = spec.basis.col(s) * spec.basis.col(s).adjoint();
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const cplx t = kernel[static_cast<size_t>(((j - l) % n + n) % n)];
        for (int c = 0; c < k; ++c)
          for (int d = 0; d < k; ++d) h(static_cast<Eigen::Index>(c) * n + j, static_cast<Eigen::Index>(d) * n + l) += proj(c, d) * t;
      }
  }
  for (int j = 0; j < n; ++j) {
    const CMatrix vj = v.sample(j);
    for (int c = 0; c < k; ++c)
      for (int d = 0; d < k; ++d) h(static_cast<Eigen::Index>(c) * n + j, static_cast<Eigen::Index>(d) * n + j) += vj(c, d);
  }
  const double asym = topobohm::hermiticity_residual(h);
  if (asym > 1e-10) throw std::logic_error("discretized Hamiltonian is not Hermitian (residual " + std::to_string(asym) + ")");
  return 0.5 * (h + h.adjoint());
}

namespace {

std::vector<double> lowest(const CMatrix& h, int n_levels) {
  if (n_levels < 1 || n_levels > h.rows() / 4) throw DomainError("n_levels must lie in [1, grid size / 4]");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + n_levels);
}

}  // namespace

std::vector<double> spectrum(int n, const MatrixRep& factor, const Potential& v, int n_levels) {
  return lowest(hamiltonian_matrix(n, factor, 0.0, v), n_levels);
}

std::vector<double> spectrum_flux(int n, double flux, double charge, const Potential& v, int n_levels) {
  return lowest(hamiltonian_matrix(n, MatrixRep(), charge * flux / kTwoPi, v), n_levels);
}

// ---------------------------------------------------------------- two rings

double TorusGrid::norm() const {
  double s = 0.0;
  for (const auto& z : chi) s += std::norm(z);
  return std::sqrt(s * dtheta() * dtheta());
}

TorusGrid make_torus_state(int n, int sector, double beta, std::vector<cplx> values) {
  require_grid(n);
  if (sector != 1 && sector != -1) throw DomainError("exchange sector must be +1 or -1");
  if (values.size() != static_cast<size_t>(n) * static_cast<size_t>(n)) throw DomainError("torus state needs n*n samples");
  TorusGrid g{n, sector, beta, std::move(values)};
  const double nrm = g.norm();
  if (!(nrm > 0.0)) throw DomainError("cannot normalize a zero wave function");
  for (auto& z : g.chi) z /= nrm;
  const double r = exchange_residual(g);
  if (r > 1e-10)
    throw DomainError("initial data is not " + std::string(sector > 0 ? "symmetric" : "antisymmetric") +
                      " under exchange (residual " + std::to_string(r) + ")");
  return g;
}

double exchange_residual(const TorusGrid& s) {
  double r = 0.0;
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) r = std::max(r, std::abs(s.at(j, i) - static_cast<double>(s.sector) * s.at(i, j)));
  return r;
}

double diagonal_residual(const TorusGrid& s) {
  double r = 0.0;
  for (int i = 0; i < s.n; ++i) r = std::max(r, std::abs(s.at(i, i)));
  return r;
}

TorusPropagator::TorusPropagator(const TorusGrid& shape, std::vector<double> v, double dt, Backend backend)
    : n_(shape.n), backend_(backend) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const auto n = static_cast<size_t>(n_);
  if (v.size() != n * n) throw DomainError("two-particle potential needs n*n samples");
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (std::abs(v[static_cast<size_t>(i) * n + static_cast<size_t>(j)] - v[static_cast<size_t>(j) * n + static_cast<size_t>(i)]) > 1e-12)
        throw DomainError("potential is not symmetric under particle exchange; the exchange sector would not be preserved");
  half_v_.resize(n * n);
  for (size_t i = 0; i < n * n; ++i) half_v_[i] = std::polar(1.0, -0.5 * dt * v[i]);
  kinetic_.resize(n * n);
  const double shift = shape.beta / kTwoPi;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) {
      const double ka = shifted(a, n_, shift), kb = shifted(b, n_, shift);
      kinetic_[static_cast<size_t>(a) * n + static_cast<size_t>(b)] =
          std::polar(1.0 / (static_cast<double>(n_) * n_), -0.5 * (ka * ka + kb * kb) * dt);
    }
}

void TorusPropagator::step(TorusGrid& s) const {
  if (s.n != n_) throw DomainError("state does not match the propagator grid");
  multiply(s.chi, half_v_, backend_);
  fft_2d(s.chi.data(), n_, false, backend_);
  multiply(s.chi, kinetic_, backend_);
  fft_2d(s.chi.data(), n_, true, backend_);
  multiply(s.chi, half_v_, backend_);
}

TorusGrid step_two_particle(const TorusGrid& state, const std::vector<double>& v, double dt, Backend backend) {
  TorusGrid out = state;
  TorusPropagator(state, v, dt, backend).step(out);
  return out;
}

}  // namespace topobohm
