#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "topobohm/kernels.hpp"
#include "topobohm/linalg.hpp"
#include "topobohm/topofactor.hpp"

namespace topobohm {

/// Twisted-periodic wave function on the ring cover, stored gauge-fixed:
/// χ(θ) = Γ^{−θ/2π} ψ(θ) is strictly periodic and sampled at θ_j = 2πj/n.
/// Component c of grid point j lives at chi[c·n + j]. Σ|χ|²Δθ = 1.
///
/// `vector_potential` holds e·A for the untwisted vector-potential gauge; it
/// is zero for twisted states.
struct WaveGrid {
  int n = 0;
  int components = 1;
  std::vector<cplx> chi;
  MatrixRep factor;
  double vector_potential = 0.0;

  double dtheta() const { return kTwoPi / n; }
  double theta(int j) const { return dtheta() * j; }
  cplx& at(int c, int j) { return chi[static_cast<size_t>(c) * static_cast<size_t>(n) + static_cast<size_t>(j)]; }
  cplx at(int c, int j) const { return chi[static_cast<size_t>(c) * static_cast<size_t>(n) + static_cast<size_t>(j)]; }
  /// χ(θ_j) as a k-vector.
  CVector spinor(int j) const;
  double density(int j) const;
  double norm() const;
  /// Eigenbasis of Γ₁ and the phases β_j (one per sector).
  UnitarySpectrum sectors() const;
};

/// How the input to twist_embed is interpreted.
enum class EmbedInput {
  /// Strictly periodic data, taken as χ directly.
  gauge_fixed,
  /// ψ on one sheet [0, 2π), satisfying the declared twist; χ = Γ^{−θ/2π}ψ.
  cover_sheet,
};

/// Build a normalized WaveGrid on the ring (deck group ℤ). `values` holds
/// components × n samples, component-major. Throws DomainError for a
/// non-unitary factor or bad sizes.
WaveGrid twist_embed(std::vector<cplx> values, int components, const MatrixRep& factor,
                     EmbedInput input = EmbedInput::gauge_fixed);
WaveGrid twist_embed(std::vector<cplx> values, const Character& factor, EmbedInput input = EmbedInput::gauge_fixed);

/// ψ(θ_j + 2π·sheet) = Γ^{sheet + θ_j/2π} χ(θ_j), components × n.
std::vector<cplx> reconstruct_sheet(const WaveGrid& state, long long sheet);

/// max over the sheets −1, 0, 1 and the grid of |ψ(θ + 2π) − Γ₁ψ(θ)|.
double twist_residual(const WaveGrid& state);

/// Real scalar or Hermitian-matrix potential sampled on the base grid. When
/// `covariant` is set, the samples are V₀ = Γ^{−θ/2π} V*(θ) Γ^{θ/2π} of a
/// covariant cover-side field V* (the gauge-fixed picture of V*).
struct Potential {
  int components = 1;
  std::vector<double> scalar;   // n samples (used when matrix is empty)
  std::vector<CMatrix> matrix;  // n samples, components × components
  bool covariant = false;

  static Potential zero(int n, int components = 1);
  static Potential from_scalar(std::vector<double> values, int components = 1);
  static Potential from_matrices(std::vector<CMatrix> values);
  /// V₀ for V*(θ) = Γ^{θ/2π} V₀(θ) Γ^{−θ/2π}.
  static Potential covariant_field(std::vector<CMatrix> v0);

  int size() const { return static_cast<int>(matrix.empty() ? scalar.size() : matrix.size()); }
  bool is_matrix() const { return !matrix.empty(); }
  /// V(θ_j) as a matrix (scalar samples are multiplied into the identity).
  CMatrix sample(int j) const;
  /// Largest ‖V − V†‖_max over the samples.
  double hermiticity_residual() const;
};

/// Sample a function of θ on the n-point grid.
std::vector<double> sample_grid(int n, const std::function<double(double)>& f);

/// Refuses (IncompatibleFactorError) if V is not covariant and the factor does
/// not commute with every sample V(θ_j). Throws DomainError for non-Hermitian
/// samples or mismatched sizes.
void require_compatible(const MatrixRep& factor, const Potential& v, int n);

/// Strang split-step propagator (V/2 – T – V/2) for ring states. The kinetic
/// factor is applied in Fourier space per character sector with wavenumbers
/// k_m = m + β_j/2π − eA.
class Propagator {
 public:
  Propagator(const WaveGrid& shape, const Potential& v, double dt, Backend backend = Backend::omp);

  void step(WaveGrid& state) const;
  void advance(WaveGrid& state, long long steps) const;
  double dt() const { return dt_; }

 private:
  void half_potential(WaveGrid& state) const;
  void kinetic(WaveGrid& state) const;

  int n_;
  int k_;
  double dt_;
  Backend backend_;
  bool sector_rotate_;
  CMatrix basis_;                     // columns: eigenvectors of Γ₁
  std::vector<cplx> kinetic_phase_;   // components × n (sector basis)
  std::vector<cplx> scalar_phase_;    // n, used for scalar potentials
  std::vector<CMatrix> matrix_phase_; // n, used for matrix potentials
  MatrixRep factor_;
  double vector_potential_;
};

/// One Strang step of a twisted state (vector_potential must be zero).
WaveGrid step_splitstep(const WaveGrid& state, const Potential& v, double dt, Backend backend = Backend::omp);

/// One Strang step in the vector-potential gauge with constant e·A = charge·A.
/// The state must be untwisted (DomainError otherwise).
WaveGrid step_vector_potential(const WaveGrid& state, double a_const, double charge, const Potential& v, double dt,
                               Backend backend = Backend::omp);

/// Plain periodic state marked as living in the vector-potential gauge.
WaveGrid with_vector_potential(WaveGrid state, double flux, double charge);

/// ψ' = e^{−ieAθ}ψ_A with A = Φ/2π: a twisted state with γ = e^{−ieΦ}. Exact on
/// the grid (the gauge-fixed χ is ψ_A shifted by an integer wavenumber).
WaveGrid gauge_map(const WaveGrid& state_a, double flux, double charge);
/// Inverse of gauge_map.
WaveGrid gauge_map_inverse(const WaveGrid& twisted, double flux, double charge);

/// Dense Hermitian grid operator H in the gauge-fixed picture
/// (components·n square), used by spectrum() and the reference integrators.
CMatrix hamiltonian_matrix(int n, const MatrixRep& factor, double vector_potential, const Potential& v);

/// Lowest `n_levels` eigenvalues of the discretized Hamiltonian, sorted.
/// Requires n_levels ≤ n·components/4.
std::vector<double> spectrum(int n, const MatrixRep& factor, const Potential& v, int n_levels);
/// Vector-potential gauge spectrum for flux Φ and charge e.
std::vector<double> spectrum_flux(int n, double flux, double charge, const Potential& v, int n_levels);

/// Two identical particles on the ring: χ on the n×n torus grid (row θ₁,
/// column θ₂), in the exchange sector `sector` = +1 (bosons) or −1
/// (fermions). Both coordinates carry the common twist β.
struct TorusGrid {
  int n = 0;
  int sector = 1;
  double beta = 0.0;
  std::vector<cplx> chi;

  double dtheta() const { return kTwoPi / n; }
  cplx& at(int i, int j) { return chi[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)]; }
  cplx at(int i, int j) const { return chi[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)]; }
  double norm() const;
};

/// Validates exchange (anti)symmetry to 1e−10 and normalizes.
TorusGrid make_torus_state(int n, int sector, double beta, std::vector<cplx> values);
/// max |χ(θ₂, θ₁) − sector·χ(θ₁, θ₂)|.
double exchange_residual(const TorusGrid& state);
/// max |χ(θ, θ)|.
double diagonal_residual(const TorusGrid& state);

class TorusPropagator {
 public:
  /// `v` is n×n row-major; must be swap-symmetric to 1e−12.
  TorusPropagator(const TorusGrid& shape, std::vector<double> v, double dt, Backend backend = Backend::omp);
  void step(TorusGrid& state) const;

 private:
  int n_;
  Backend backend_;
  std::vector<cplx> half_v_;
  std::vector<cplx> kinetic_;
};

TorusGrid step_two_particle(const TorusGrid& state, const std::vector<double>& v, double dt,
                            Backend backend = Backend::omp);

}  // namespace topobohm
