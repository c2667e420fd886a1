#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "topobohm/deck.hpp"
#include "topobohm/finite_group.hpp"
#include "topobohm/linalg.hpp"

namespace topobohm {

/// Homomorphism from a deck group into U(1), fixed by its values on
/// generators(group). Unimodularity and the group relations are enforced at
/// construction.
class Character {
 public:
  const DeckGroup& group() const { return group_; }
  const std::vector<cplx>& generator_values() const { return values_; }

  /// γ_σ.
  cplx operator()(const DeckElement& s) const;
  bool is_trivial(double tol = 1e-12) const;

  /// For ℤ: the phase β ∈ (−π, π] with γ₁ = e^{iβ}.
  double beta() const;

 private:
  friend Character make_character(const DeckGroup&, std::vector<cplx>);
  Character(DeckGroup group, std::vector<cplx> values) : group_(std::move(group)), values_(std::move(values)) {}

  DeckGroup group_;
  std::vector<cplx> values_;
};

/// Validated character. Throws DomainError if a value has |γ| ≠ 1 (to 1e−12)
/// or the values violate the group's relations.
Character make_character(const DeckGroup& group, std::vector<cplx> generator_values);

/// Ring character γ₁ = e^{iβ}.
Character ring_character(double beta);

/// Characters of the finite group S_N, as deck-group characters.
std::vector<Character> enumerate_characters(const DeckGroup& group);

/// Unitary matrix representation of a deck group, fixed by generator matrices.
class MatrixRep {
 public:
  /// Trivial one-dimensional representation of ℤ.
  MatrixRep() : group_(DeckGroup::integers()), gens_{CMatrix::Identity(1, 1)}, dim_(1) {}

  const DeckGroup& group() const { return group_; }
  int dimension() const { return dim_; }
  const std::vector<CMatrix>& generator_matrices() const { return gens_; }

  /// Γ_σ.
  CMatrix operator()(const DeckElement& s) const;

  bool is_trivial(double tol = 1e-12) const;
  bool is_scalar(double tol = 1e-12) const;

  /// Hashes of potential samples certified to commute with every generator.
  const std::vector<std::size_t>& commuting_certificate() const { return certificate_; }

 private:
  friend MatrixRep make_matrix_rep(const DeckGroup&, std::vector<CMatrix>);
  friend MatrixRep scalar_rep(const Character&, int);
  friend bool check_commutes(MatrixRep&, std::span<const CMatrix>);
  MatrixRep(DeckGroup group, std::vector<CMatrix> gens)
      : group_(std::move(group)), gens_(std::move(gens)), dim_(static_cast<int>(gens_.front().rows())) {}

  DeckGroup group_;
  std::vector<CMatrix> gens_;
  int dim_;
  std::vector<std::size_t> certificate_;
};

/// Validated representation: generators unitary and group relations satisfied
/// to 1e−12. Throws DomainError otherwise.
MatrixRep make_matrix_rep(const DeckGroup& group, std::vector<CMatrix> generator_matrices);

/// Character γ embedded as Γ_σ = γ_σ·I_k.
MatrixRep scalar_rep(const Character& ch, int dimension);

/// Aharonov–Casher factor on the ring: Γ₁ = exp(−i·angle·e·σ) with
/// angle = 4πμλ/ħ.
MatrixRep aharonov_casher_rep(const Eigen::Vector3d& axis, double angle);

/// True iff ‖[Γ_g, V_i]‖_max ≤ 1e−10 for every generator g and sample i.
/// Throws DomainError on a non-Hermitian sample or dimension mismatch.
bool check_commutes(const MatrixRep& factor, std::span<const CMatrix> potential_samples);
/// As above; on success records the sample hashes in the factor's certificate.
bool check_commutes(MatrixRep& factor, std::span<const CMatrix> potential_samples);

/// Largest ‖[Γ_g, V_i]‖_max.
double commutation_residual(const MatrixRep& factor, std::span<const CMatrix> potential_samples);

enum class DynamicsClass { C0, C1, C2 };
std::string to_string(DynamicsClass c);

struct Classification {
  DynamicsClass label = DynamicsClass::C0;
  /// False when the factor fails to commute with the potential samples.
  bool compatible = true;
  double commutator_residual = 0.0;
  /// Dimension of the algebra generated by the samples (with identity).
  int algebra_dimension = 0;
  /// k² for k-dimensional W.
  int full_dimension = 0;
  bool algebra_spans_full = false;
  std::string verdict;
};

/// Dimension of the linear span of all products of the samples (and the
/// identity) up to `word_length_cap` factors; rank via singular values
/// above 1e−8 (relative to the largest).
int generated_algebra_dimension(std::span<const CMatrix> samples, int word_length_cap = 6);

/// C0 for a trivial factor, C1 for scalar factors, C2 for matrix factors that
/// commute with the potential. A non-scalar factor against a generic potential
/// (generated algebra = End(W)) or a failed commutation gives an
/// incompatibility verdict, not an exception.
Classification classify_dynamics(const MatrixRep& factor, std::span<const CMatrix> potential_samples,
                                 int word_length_cap = 6);
Classification classify_dynamics(const Character& factor, std::span<const CMatrix> potential_samples,
                                 int word_length_cap = 6);

/// Conjugation check for two representations of the same group:
/// true iff Γ'_g = U Γ_g U† for all generators to `tol`.
bool are_conjugate_by(const MatrixRep& a, const MatrixRep& b, const CMatrix& u, double tol = 1e-10);

struct CharacterSector {
  Character character;
  /// Orthonormal basis of the sector (columns).
  CMatrix basis;
  CMatrix projector() const { return basis * basis.adjoint(); }
};

/// Simultaneous eigendecomposition Γ_σ = Σ_i γ_σ^{(i)} P_i for abelian images
/// (ℤ, or F_g with commuting generator matrices). Throws
/// IncompatibleFactorError if the generators do not commute.
std::vector<CharacterSector> decompose_by_character(const MatrixRep& factor);

/// Holonomy-twisted representation materialized on a finite window of deck
/// elements. Each entry holds Γ_σ and the holonomy h_σ of a loop whose lift
/// runs from the base point to σq̂.
class TwistedRepTable {
 public:
  struct Entry {
    CMatrix factor;
    CMatrix holonomy;
  };

  TwistedRepTable(DeckGroup group, int dimension) : group_(std::move(group)), dim_(dimension) {}

  /// Ordinary representation with trivial holonomy on all elements whose
  /// words (windings) have length ≤ radius.
  static TwistedRepTable from_matrix_rep(const MatrixRep& rep, int radius);

  /// N-fermion factor Γ_σ = sgn(p) ⊗ Γ_{σ^{(i)}} with permutation holonomy, on
  /// all (p, σ̃) whose words have length ≤ radius.
  static TwistedRepTable nfermion(int particles, std::span<const CMatrix> generator_matrices, int radius,
                                  std::span<const int> labels = {});

  const DeckGroup& group() const { return group_; }
  int dimension() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

  void set(const DeckElement& s, Entry e);
  const Entry* find(const DeckElement& s) const;
  const Entry& at(const DeckElement& s) const;

  /// Elements whose pairwise products stay inside the table.
  const std::vector<DeckElement>& sample_pool() const { return pool_; }
  void set_sample_pool(std::vector<DeckElement> pool) { pool_ = std::move(pool); }

 private:
  DeckGroup group_;
  int dim_;
  std::map<DeckElement, Entry> entries_;
  std::vector<DeckElement> pool_;
};

/// max over `samples` seeded pairs (σ₁, σ₂) from the pool of
/// ‖Γ_{σ₁σ₂} − h_{σ₂} Γ_{σ₁} h_{σ₂}⁻¹ Γ_{σ₂}‖_max.
double verify_twisted_law(const TwistedRepTable& table, int samples, std::uint64_t seed);

inline constexpr int kMaxTensorDimension = 27;

/// Γ_σ(q̂) = sgn(p) ⊗_slots Γ_{σ^{(i_q̂(slot))}} on W^{⊗N}. `labels[s]` is the
/// particle index whose base point occupies tensor slot s (identity if empty).
/// N ≤ 3 and dim W ≤ 3.
CMatrix nfermion_factor(int particles, int w_dim, std::span<const CMatrix> generator_matrices,
                        const SemidirectElement& sigma, std::span<const int> labels = {});

/// Permutation operator on W^{⊗N}: slot j receives the vector from slot p(j).
CMatrix tensor_permutation(const Permutation& p, int w_dim);

/// Holonomy of the N-fermion bundle for σ = (p, σ̃) at the given labelling.
CMatrix nfermion_holonomy(const Permutation& p, int w_dim, std::span<const int> labels = {});

/// Cover-side Hermitian field sampled on several ring sheets at the same base
/// grid: values[s][j] = V*(θ_j + 2π·sheets[s]).
struct CoverMatrixField {
  std::vector<long long> sheets;
  std::vector<std::vector<CMatrix>> values;
};

/// max ‖V*(σq̂) − Γ_σ V*(q̂) Γ_σ⁻¹‖_max over sheets relative to the first.
double covariance_residual(const CoverMatrixField& vstar, const MatrixRep& factor);
bool check_covariant_potential(const CoverMatrixField& vstar, const MatrixRep& factor, double tol);

}  // namespace topobohm
