#include "topobohm/topofactor.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "topobohm/errors.hpp"
#include "topobohm/hash.hpp"

namespace topobohm {

namespace {

constexpr double kUnitTol = 1e-12;

int generator_count(const DeckGroup& g) { return static_cast<int>(generators(g).size()); }

/// Largest residual of the defining relations of `group` evaluated on the
/// generator images (1×1 matrices for characters).
double relation_residual(const DeckGroup& group, const std::vector<CMatrix>& gens) {
  const auto kind = group.kind();
  if (kind == DeckGroupKind::Integers || kind == DeckGroupKind::Free) return 0.0;
  const int n = group.particles();
  const int nt = n - 1;
  const auto k = gens.front().rows();
  const CMatrix id = CMatrix::Identity(k, k);
  double r = 0.0;
  for (int i = 0; i < nt; ++i) {
    const CMatrix& si = gens[static_cast<size_t>(i)];
    r = std::max(r, max_abs(si * si - id));
    for (int j = i + 1; j < nt; ++j) {
      const CMatrix& sj = gens[static_cast<size_t>(j)];
      const CMatrix p = si * sj;
      if (j == i + 1)
        r = std::max(r, max_abs(p * p * p - id));
      else
        r = std::max(r, max_abs(p * p - id));
    }
  }
  if (kind == DeckGroupKind::Semidirect) {
    const int g = group.rank();
    auto a = [&](int particle, int gen) -> const CMatrix& {
      return gens[static_cast<size_t>(nt + particle * g + gen)];
    };
    for (int i = 0; i < nt; ++i) {
      const CMatrix& si = gens[static_cast<size_t>(i)];
      const Permutation t = Permutation::transposition(n, i, i + 1);
      for (int j = 0; j < n; ++j)
        for (int h = 0; h < g; ++h) r = std::max(r, max_abs(si * a(j, h) * si.adjoint() - a(t(j), h)));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int h1 = 0; h1 < g; ++h1)
          for (int h2 = 0; h2 < g; ++h2) r = std::max(r, commutator_norm(a(i, h1), a(j, h2)));
  }
  return r;
}

std::vector<CMatrix> as_matrices(const std::vector<cplx>& values) {
  std::vector<CMatrix> out;
  for (cplx v : values) out.push_back(CMatrix::Constant(1, 1, v));
  return out;
}

std::size_t matrix_hash(const CMatrix& m) {
  return static_cast<std::size_t>(fnv1a64(m.data(), sizeof(cplx) * static_cast<std::size_t>(m.size())));
}

void require_hermitian_samples(std::span<const CMatrix> samples, Eigen::Index k) {
  for (const auto& v : samples) {
    if (v.rows() != k || v.cols() != k) throw DomainError("potential sample dimension does not match the factor");
    if (hermiticity_residual(v) > 1e-12) throw DomainError("potential sample is not Hermitian");
  }
}

}  // namespace

// ------------------------------------------------------------------ Character

Character make_character(const DeckGroup& group, std::vector<cplx> values) {
  if (static_cast<int>(values.size()) != generator_count(group))
    throw DomainError("character needs one value per generator of " + group.describe());
  for (cplx v : values)
    if (std::abs(std::abs(v) - 1.0) > kUnitTol)
      throw DomainError("topological factor must have modulus 1 (|gamma| = " + std::to_string(std::abs(v)) +
                        "); otherwise |psi|^2 is not deck-invariant and equivariance is lost");
  if (relation_residual(group, as_matrices(values)) > kUnitTol)
    throw DomainError("character values violate the relations of " + group.describe());
  return Character(group, std::move(values));
}

Character ring_character(double beta) { return make_character(DeckGroup::integers(), {std::polar(1.0, beta)}); }

cplx Character::operator()(const DeckElement& s) const {
  if (group_.kind() == DeckGroupKind::Integers) {
    group_.require(s);
    return std::polar(1.0, static_cast<double>(std::get<Winding>(s).turns) * std::arg(values_.front()));
  }
  cplx r = 1.0;
  for (const auto& f : factorize(group_, s)) {
    const cplx v = values_[static_cast<size_t>(f.index)];
    r *= f.power > 0 ? v : std::conj(v);
  }
  return r;
}

bool Character::is_trivial(double tol) const {
  return std::all_of(values_.begin(), values_.end(), [&](cplx v) { return std::abs(v - 1.0) <= tol; });
}

double Character::beta() const {
  if (group_.kind() != DeckGroupKind::Integers) throw DomainError("beta() is defined for ring characters only");
  return wrap_phase(std::arg(values_.front()));
}

std::vector<Character> enumerate_characters(const DeckGroup& group) {
  switch (group.kind()) {
    case DeckGroupKind::Integers:
      throw DomainError("characters of Z form the one-parameter family gamma_1 = e^{i beta}, beta in (-pi, pi]");
    case DeckGroupKind::Free:
      throw DomainError("characters of F_" + std::to_string(group.rank()) +
                        " form the torus of independent phases on each generator");
    case DeckGroupKind::Semidirect:
      throw DomainError("characters of " + group.describe() +
                        " form the family (sign^s, common phase per free generator)");
    case DeckGroupKind::Symmetric: break;
  }
  if (group.particles() < 2) return {make_character(group, {})};
  const auto finite = FinitePermGroup::symmetric(group.particles());
  std::vector<Character> out;
  for (const auto& fc : enumerate_characters(finite)) out.push_back(make_character(group, fc.generator_values));
  return out;
}

// ------------------------------------------------------------------ MatrixRep

MatrixRep make_matrix_rep(const DeckGroup& group, std::vector<CMatrix> gens) {
  if (static_cast<int>(gens.size()) != generator_count(group) || gens.empty())
    throw DomainError("representation needs one matrix per generator of " + group.describe());
  const auto k = gens.front().rows();
  for (const auto& m : gens) {
    if (m.rows() != k || m.cols() != k) throw DomainError("generator matrices must be square of equal size");
    if (unitarity_residual(m) > kUnitTol) throw DomainError("generator matrix is not unitary");
  }
  if (relation_residual(group, gens) > kUnitTol)
    throw DomainError("generator matrices violate the relations of " + group.describe());
  return MatrixRep(group, std::move(gens));
}

MatrixRep scalar_rep(const Character& ch, int dimension) {
  std::vector<CMatrix> gens;
  for (cplx v : ch.generator_values()) gens.push_back(v * CMatrix::Identity(dimension, dimension));
  if (gens.empty()) throw DomainError("scalar_rep: group has no generators");
  return MatrixRep(ch.group(), std::move(gens));
}

MatrixRep aharonov_casher_rep(const Eigen::Vector3d& axis, double angle) {
  return make_matrix_rep(DeckGroup::integers(), {spin_rotation(axis, angle)});
}

CMatrix MatrixRep::operator()(const DeckElement& s) const {
  if (group_.kind() == DeckGroupKind::Integers) {
    group_.require(s);
    return unitary_power(gens_.front(), std::get<Winding>(s).turns);
  }
  CMatrix r = CMatrix::Identity(dim_, dim_);
  for (const auto& f : factorize(group_, s)) {
    const CMatrix& g = gens_[static_cast<size_t>(f.index)];
    r = f.power > 0 ? CMatrix(r * g) : CMatrix(r * g.adjoint());
  }
  return r;
}

bool MatrixRep::is_trivial(double tol) const {
  const CMatrix id = CMatrix::Identity(dim_, dim_);
  return std::all_of(gens_.begin(), gens_.end(), [&](const CMatrix& g) { return max_abs(g - id) <= tol; });
}

bool MatrixRep::is_scalar(double tol) const {
  return std::all_of(gens_.begin(), gens_.end(),
                     [&](const CMatrix& g) { return is_scalar_multiple_of_identity(g, tol); });
}

double commutation_residual(const MatrixRep& factor, std::span<const CMatrix> samples) {
  require_hermitian_samples(samples, factor.dimension());
  double r = 0.0;
  for (const auto& g : factor.generator_matrices())
    for (const auto& v : samples) r = std::max(r, commutator_norm(g, v));
  return r;
}

bool check_commutes(const MatrixRep& factor, std::span<const CMatrix> samples) {
  return commutation_residual(factor, samples) <= 1e-10;
}

bool check_commutes(MatrixRep& factor, std::span<const CMatrix> samples) {
  const bool ok = check_commutes(static_cast<const MatrixRep&>(factor), samples);
  if (ok)
    for (const auto& v : samples) factor.certificate_.push_back(matrix_hash(v));
  return ok;
}

std::string to_string(DynamicsClass c) {
  switch (c) {
    case DynamicsClass::C0: return "C0";
    case DynamicsClass::C1: return "C1";
    case DynamicsClass::C2: return "C2";
  }
  return "?";
}

int generated_algebra_dimension(std::span<const CMatrix> samples, int word_length_cap) {
  if (samples.empty()) return 1;
  const auto k = samples.front().rows();
  const Eigen::Index full = k * k;
  auto vec = [&](const CMatrix& m) { return CVector(Eigen::Map<const CVector>(m.data(), full)); };

  // Orthonormal basis (columns) of the span found so far, starting from I.
  CMatrix basis = vec(CMatrix::Identity(k, k)).normalized();
  std::vector<CMatrix> frontier{CMatrix::Identity(k, k)};
  for (int level = 1; level <= word_length_cap && basis.cols() < full; ++level) {
    std::vector<CMatrix> candidates;
    for (const auto& f : frontier)
      for (const auto& v : samples) {
        CMatrix p = f * v;
        const double nrm = p.norm();
        if (nrm > 0.0) candidates.push_back(p / nrm);
      }
    CMatrix stack(full, basis.cols() + static_cast<Eigen::Index>(candidates.size()));
    stack.leftCols(basis.cols()) = basis;
    for (size_t c = 0; c < candidates.size(); ++c) stack.col(basis.cols() + static_cast<Eigen::Index>(c)) = vec(candidates[c]);
    Eigen::JacobiSVD<CMatrix> svd(stack, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-8 * sv(0)) ++rank;
    if (rank == basis.cols()) break;
    basis = svd.matrixU().leftCols(rank);
    frontier.clear();
    for (Eigen::Index c = 0; c < rank; ++c) frontier.emplace_back(Eigen::Map<const CMatrix>(basis.col(c).data(), k, k));
  }
  return static_cast<int>(basis.cols());
}

Classification classify_dynamics(const MatrixRep& factor, std::span<const CMatrix> samples, int word_length_cap) {
  if (samples.empty()) throw DomainError("classify_dynamics needs at least one potential sample");
  Classification c;
  const int k = factor.dimension();
  c.full_dimension = k * k;
  c.commutator_residual = commutation_residual(factor, samples);
  c.algebra_dimension = generated_algebra_dimension(samples, word_length_cap);
  c.algebra_spans_full = c.algebra_dimension == c.full_dimension;
  if (factor.is_trivial()) {
    c.label = DynamicsClass::C0;
    c.verdict = "trivial factor: immediate dynamics";
  } else if (factor.is_scalar()) {
    c.label = DynamicsClass::C1;
    c.verdict = "scalar factor given by a character; compatible with every potential";
  } else {
    c.label = DynamicsClass::C2;
    if (c.algebra_spans_full) {
      c.compatible = false;
      c.verdict = "incompatible: potential samples generate End(W); only scalar factors commute with them";
    } else if (c.commutator_residual > 1e-10) {
      c.compatible = false;
      c.verdict = "incompatible: factor does not commute with every V(q)";
    } else {
      c.verdict = "matrix factor not given by a character; commutes with the potential";
    }
  }
  return c;
}

Classification classify_dynamics(const Character& factor, std::span<const CMatrix> samples, int word_length_cap) {
  const int k = samples.empty() ? 1 : static_cast<int>(samples.front().rows());
  return classify_dynamics(scalar_rep(factor, k), samples, word_length_cap);
}

bool are_conjugate_by(const MatrixRep& a, const MatrixRep& b, const CMatrix& u, double tol) {
  if (!(a.group() == b.group()) || a.dimension() != b.dimension()) return false;
  for (size_t g = 0; g < a.generator_matrices().size(); ++g)
    if (max_abs(u * a.generator_matrices()[g] * u.adjoint() - b.generator_matrices()[g]) > tol) return false;
  return true;
}

// -------------------------------------------------------- character sectors

std::vector<CharacterSector> decompose_by_character(const MatrixRep& factor) {
  const auto& gens = factor.generator_matrices();
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j)
      if (commutator_norm(gens[i], gens[j]) > 1e-10)
        throw IncompatibleFactorError("decomposition unavailable: generator matrices do not commute");

  const int k = factor.dimension();
  std::vector<CMatrix> blocks{CMatrix::Identity(k, k)};
  constexpr double cluster_tol = 1e-8;
  for (const auto& g : gens) {
    std::vector<CMatrix> refined;
    for (const auto& b : blocks) {
      const CMatrix m = b.adjoint() * g * b;
      if (max_abs(g * b - b * m) > 1e-10) throw IncompatibleFactorError("decomposition unavailable: block not invariant");
      const auto spec = unitary_spectrum(m);
      // Group eigenphases by circular distance.
      std::vector<int> order(spec.phases.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int c) { return spec.phases[static_cast<size_t>(a)] < spec.phases[static_cast<size_t>(c)]; });
      std::vector<std::vector<int>> clusters;
      for (int idx : order) {
        const double ph = spec.phases[static_cast<size_t>(idx)];
        bool placed = false;
        for (auto& cl : clusters) {
          const double d = std::abs(wrap_phase(ph - spec.phases[static_cast<size_t>(cl.front())]));
          if (d < cluster_tol) {
            cl.push_back(idx);
            placed = true;
            break;
          }
        }
        if (!placed) clusters.push_back({idx});
      }
      for (const auto& cl : clusters) {
        CMatrix sub(b.cols(), static_cast<Eigen::Index>(cl.size()));
        for (size_t c = 0; c < cl.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = spec.basis.col(cl[c]);
        refined.push_back(b * sub);
      }
    }
    blocks = std::move(refined);
  }

  std::vector<CharacterSector> out;
  for (const auto& b : blocks) {
    std::vector<cplx> values;
    for (const auto& g : gens) {
      const cplx v = (b.adjoint() * g * b).trace() / static_cast<double>(b.cols());
      values.push_back(v / std::abs(v));
    }
    out.push_back(CharacterSector{make_character(factor.group(), std::move(values)), b});
  }
  return out;
}

// -------------------------------------------------------- twisted reps

namespace {

std::vector<FreeWord> words_up_to(int rank, int radius) {
  std::vector<FreeWord> out{FreeWord{}};
  std::vector<FreeWord> layer{FreeWord{}};
  for (int len = 1; len <= radius; ++len) {
    std::vector<FreeWord> next;
    for (const auto& w : layer)
      for (int g = 1; g <= rank; ++g)
        for (int l : {g, -g}) {
          if (!w.letters().empty() && w.letters().back() == -l) continue;
          auto letters = w.letters();
          letters.push_back(l);
          next.push_back(FreeWord::checked(std::move(letters), std::max(radius, kDefaultMaxWordLength)));
        }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::vector<Permutation> all_permutations(int n) {
  std::vector<int> im(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) im[static_cast<size_t>(i)] = i;
  std::vector<Permutation> out;
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

std::vector<DeckElement> window(const DeckGroup& group, int radius) {
  std::vector<DeckElement> out;
  switch (group.kind()) {
    case DeckGroupKind::Integers:
      for (int k = -radius; k <= radius; ++k) out.emplace_back(Winding{k});
      break;
    case DeckGroupKind::Free:
      for (auto& w : words_up_to(group.rank(), radius)) out.emplace_back(std::move(w));
      break;
    case DeckGroupKind::Symmetric:
      for (auto& p : all_permutations(group.particles())) out.emplace_back(std::move(p));
      break;
    case DeckGroupKind::Semidirect: {
      const auto words = words_up_to(group.rank(), radius);
      const int n = group.particles();
      for (const auto& p : all_permutations(n)) {
        std::vector<size_t> idx(static_cast<size_t>(n), 0);
        for (;;) {
          SemidirectElement e{p, {}};
          for (size_t i : idx) e.words.push_back(words[i]);
          out.emplace_back(std::move(e));
          size_t d = 0;
          while (d < idx.size() && ++idx[d] == words.size()) idx[d++] = 0;
          if (d == idx.size()) break;
        }
      }
      break;
    }
  }
  return out;
}

std::vector<int> resolve_labels(std::span<const int> labels, int n) {
  std::vector<int> out(static_cast<size_t>(n));
  if (labels.empty()) {
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = i;
    return out;
  }
  if (static_cast<int>(labels.size()) != n) throw DomainError("labels must list one particle per tensor slot");
  out.assign(labels.begin(), labels.end());
  Permutation check(out);  // validates bijection
  (void)check;
  return out;
}

CMatrix word_matrix(const FreeWord& w, std::span<const CMatrix> gens, Eigen::Index k) {
  CMatrix r = CMatrix::Identity(k, k);
  for (int l : w.letters()) {
    const auto g = static_cast<size_t>(std::abs(l) - 1);
    if (g >= gens.size()) throw DomainError("word uses a generator without a matrix");
    r = l > 0 ? CMatrix(r * gens[g]) : CMatrix(r * gens[g].adjoint());
  }
  return r;
}

}  // namespace

TwistedRepTable TwistedRepTable::from_matrix_rep(const MatrixRep& rep, int radius) {
  TwistedRepTable t(rep.group(), rep.dimension());
  const CMatrix id = CMatrix::Identity(rep.dimension(), rep.dimension());
  for (const auto& s : window(rep.group(), radius)) t.set(s, Entry{rep(s), id});
  t.set_sample_pool(window(rep.group(), radius / 2));
  return t;
}

TwistedRepTable TwistedRepTable::nfermion(int particles, std::span<const CMatrix> gens, int radius,
                                          std::span<const int> labels) {
  if (gens.empty()) throw DomainError("nfermion table needs at least one generator matrix");
  const int w = static_cast<int>(gens.front().rows());
  const auto group = DeckGroup::semidirect(particles, static_cast<int>(gens.size()));
  int dim = 1;
  for (int i = 0; i < particles; ++i) dim *= w;
  TwistedRepTable t(group, dim);
  for (const auto& s : window(group, radius)) {
    const auto& e = std::get<SemidirectElement>(s);
    t.set(s, Entry{nfermion_factor(particles, w, gens, e, labels), nfermion_holonomy(e.perm, w, labels)});
  }
  t.set_sample_pool(window(group, radius / 2));
  return t;
}

void TwistedRepTable::set(const DeckElement& s, Entry e) {
  group_.require(s);
  if (e.factor.rows() != dim_ || e.holonomy.rows() != dim_) throw DomainError("table entry has wrong dimension");
  entries_[s] = std::move(e);
}

const TwistedRepTable::Entry* TwistedRepTable::find(const DeckElement& s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? nullptr : &it->second;
}

const TwistedRepTable::Entry& TwistedRepTable::at(const DeckElement& s) const {
  const auto* e = find(s);
  if (!e) throw DomainError("deck element " + to_string(s) + " is not materialized in the table");
  return *e;
}

double verify_twisted_law(const TwistedRepTable& table, int samples, std::uint64_t seed) {
  const auto& pool = table.sample_pool();
  if (pool.empty()) throw DomainError("twisted table has an empty sample pool");
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto& s1 = pool[uniform_index(rng, pool.size())];
    const auto& s2 = pool[uniform_index(rng, pool.size())];
    const auto& e1 = table.at(s1);
    const auto& e2 = table.at(s2);
    const auto& e12 = table.at(table.group().compose(s1, s2));
    const CMatrix rhs = e2.holonomy * e1.factor * e2.holonomy.inverse() * e2.factor;
    worst = std::max(worst, max_abs(e12.factor - rhs));
  }
  return worst;
}

CMatrix tensor_permutation(const Permutation& p, int w_dim) {
  const int n = p.size();
  int dim = 1;
  for (int i = 0; i < n; ++i) dim *= w_dim;
  CMatrix out = CMatrix::Zero(dim, dim);
  std::vector<int> in_digits(static_cast<size_t>(n)), out_digits(static_cast<size_t>(n));
  for (int col = 0; col < dim; ++col) {
    int c = col;
    for (int j = n - 1; j >= 0; --j) {  // slot 0 is the most significant digit
      in_digits[static_cast<size_t>(j)] = c % w_dim;
      c /= w_dim;
    }
    for (int j = 0; j < n; ++j) out_digits[static_cast<size_t>(j)] = in_digits[static_cast<size_t>(p(j))];
    int row = 0;
    for (int j = 0; j < n; ++j) row = row * w_dim + out_digits[static_cast<size_t>(j)];
    out(row, col) = 1.0;
  }
  return out;
}

CMatrix nfermion_holonomy(const Permutation& p, int w_dim, std::span<const int> labels) {
  // With slot s holding particle L(s), conjugation must move slot factors by
  // L⁻¹ p L.
  const auto l = Permutation(resolve_labels(labels, p.size()));
  return tensor_permutation(l.inverse() * p * l, w_dim);
}

CMatrix nfermion_factor(int particles, int w_dim, std::span<const CMatrix> gens, const SemidirectElement& sigma,
                        std::span<const int> labels) {
  if (particles < 1 || particles > 3 || w_dim < 1 || w_dim > 3)
    throw DomainError("nfermion_factor: requires N <= 3 and dim W <= 3 (tensor dimension cap " +
                      std::to_string(kMaxTensorDimension) + ")");
  if (sigma.perm.size() != particles || static_cast<int>(sigma.words.size()) != particles)
    throw DomainError("nfermion_factor: element does not match the particle count");
  for (const auto& g : gens) {
    if (g.rows() != w_dim || g.cols() != w_dim) throw DomainError("nfermion_factor: generator has wrong dimension");
    if (unitarity_residual(g) > kUnitTol) throw DomainError("nfermion_factor: generator is not unitary");
  }
  const auto lab = resolve_labels(labels, particles);
  CMatrix out = CMatrix::Identity(1, 1) * static_cast<double>(sigma.perm.sign());
  for (int s = 0; s < particles; ++s)
    out = kron(out, word_matrix(sigma.words[static_cast<size_t>(lab[static_cast<size_t>(s)])], gens, w_dim));
  return out;
}

// -------------------------------------------------------- covariant fields

double covariance_residual(const CoverMatrixField& vstar, const MatrixRep& factor) {
  if (factor.group().kind() != DeckGroupKind::Integers)
    throw DomainError("covariant potentials are sampled on ring sheets");
  if (vstar.values.size() < 2 || vstar.sheets.size() != vstar.values.size())
    throw DomainError("covariance check needs samples on at least two sheets");
  const auto& ref = vstar.values.front();
  double r = 0.0;
  for (size_t s = 0; s < vstar.values.size(); ++s) {
    if (vstar.values[s].size() != ref.size()) throw DomainError("covariance check: sheets sampled at different points");
    const CMatrix g = factor(Winding{vstar.sheets[s] - vstar.sheets.front()});
    for (size_t j = 0; j < ref.size(); ++j) {
      if (hermiticity_residual(vstar.values[s][j]) > 1e-12) throw DomainError("covariant field is not Hermitian");
      r = std::max(r, max_abs(vstar.values[s][j] - g * ref[j] * g.adjoint()));
    }
  }
  return r;
}

bool check_covariant_potential(const CoverMatrixField& vstar, const MatrixRep& factor, double tol) {
  return covariance_residual(vstar, factor) <= tol;
}

}  // namespace topobohm
