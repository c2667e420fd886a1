#include "topobohm/deck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "topobohm/errors.hpp"

namespace topobohm {

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double exponential(Rng& rng, double rate) {
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return -std::log(u) / rate;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (int v : image_) {
    if (v < 0 || v >= static_cast<int>(image_.size()) || seen[static_cast<size_t>(v)])
      throw DomainError("Permutation: image is not a bijection");
    seen[static_cast<size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> im(static_cast<size_t>(n));
  std::iota(im.begin(), im.end(), 0);
  return Permutation(std::move(im));
}

Permutation Permutation::transposition(int n, int i, int j) {
  auto p = identity(n);
  std::swap(p.image_.at(static_cast<size_t>(i)), p.image_.at(static_cast<size_t>(j)));
  return p;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (size_t i = 0; i < image_.size(); ++i) inv[static_cast<size_t>(image_[i])] = static_cast<int>(i);
  Permutation r;
  r.image_ = std::move(inv);
  return r;
}

bool Permutation::is_identity() const {
  for (size_t i = 0; i < image_.size(); ++i)
    if (image_[i] != static_cast<int>(i)) return false;
  return true;
}

int Permutation::sign() const {
  std::vector<char> visited(image_.size(), 0);
  int s = 1;
  for (size_t i = 0; i < image_.size(); ++i) {
    if (visited[i]) continue;
    size_t len = 0;
    for (size_t j = i; !visited[j]; j = static_cast<size_t>(image_[j])) {
      visited[j] = 1;
      ++len;
    }
    if (len % 2 == 0) s = -s;
  }
  return s;
}

std::vector<int> Permutation::adjacent_transpositions() const {
  // Bubble-sort q = p∘s_{j1}∘…∘s_{jm} down to the identity; then
  // p = s_{jm}∘…∘s_{j1}.
  std::vector<int> q = image_;
  std::vector<int> used;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (size_t i = 0; i + 1 < q.size(); ++i) {
      if (q[i] > q[i + 1]) {
        std::swap(q[i], q[i + 1]);
        used.push_back(static_cast<int>(i));
        swapped = true;
      }
    }
  }
  std::reverse(used.begin(), used.end());
  return used;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw DomainError("Permutation product: size mismatch");
  std::vector<int> im(a.image_.size());
  for (size_t i = 0; i < im.size(); ++i) im[i] = a.image_[static_cast<size_t>(b.image_[i])];
  Permutation r;
  r.image_ = std::move(im);
  return r;
}

// ------------------------------------------------------------------- FreeWord

FreeWord FreeWord::checked(std::vector<int> letters, int max_length) {
  for (size_t i = 0; i < letters.size(); ++i) {
    if (letters[i] == 0) throw DomainError("FreeWord: letter 0 is not a generator");
    if (i > 0 && letters[i] == -letters[i - 1])
      throw DomainError("FreeWord: word is not reduced (adjacent generator-inverse pair)");
  }
  if (static_cast<int>(letters.size()) > max_length)
    throw DomainError("FreeWord: length " + std::to_string(letters.size()) + " exceeds cap " +
                      std::to_string(max_length));
  FreeWord w;
  w.letters_ = std::move(letters);
  return w;
}

FreeWord FreeWord::reduced(const std::vector<int>& letters, int max_length) {
  std::vector<int> stack;
  stack.reserve(letters.size());
  for (int l : letters) {
    if (l == 0) throw DomainError("FreeWord: letter 0 is not a generator");
    if (!stack.empty() && stack.back() == -l)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return checked(std::move(stack), max_length);
}

FreeWord FreeWord::generator(int g, int power) {
  if (g <= 0) throw DomainError("FreeWord::generator: index must be >= 1");
  std::vector<int> l(static_cast<size_t>(std::abs(power)), power >= 0 ? g : -g);
  return checked(std::move(l), std::max(kDefaultMaxWordLength, std::abs(power)));
}

int FreeWord::max_generator() const {
  int m = 0;
  for (int l : letters_) m = std::max(m, std::abs(l));
  return m;
}

long long FreeWord::exponent_sum(int g) const {
  long long s = 0;
  for (int l : letters_) {
    if (l == g) ++s;
    if (l == -g) --s;
  }
  return s;
}

FreeWord FreeWord::inverse() const {
  FreeWord w;
  w.letters_.assign(letters_.rbegin(), letters_.rend());
  for (int& l : w.letters_) l = -l;
  return w;
}

FreeWord FreeWord::times(const FreeWord& other, int max_length) const {
  std::vector<int> all = letters_;
  all.insert(all.end(), other.letters_.begin(), other.letters_.end());
  return reduced(all, max_length);
}

std::string FreeWord::to_string() const {
  if (letters_.empty()) return "e";
  std::ostringstream os;
  for (size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ' ';
    os << 'a' << std::abs(letters_[i]);
    if (letters_[i] < 0) os << "^-1";
  }
  return os.str();
}

// ------------------------------------------------------------------ Semidirect

SemidirectElement semidirect_product(const SemidirectElement& a, const SemidirectElement& b,
                                     int max_word_length) {
  const int n = a.perm.size();
  if (b.perm.size() != n || static_cast<int>(a.words.size()) != n || static_cast<int>(b.words.size()) != n)
    throw DomainError("semidirect_product: particle count mismatch");
  SemidirectElement out;
  out.perm = a.perm * b.perm;
  out.words.resize(static_cast<size_t>(n));
  // (p₂⁻¹σ̃₁p₂)_i = σ₁^{(p₂(i))}
  for (int i = 0; i < n; ++i)
    out.words[static_cast<size_t>(i)] =
        a.words[static_cast<size_t>(b.perm(i))].times(b.words[static_cast<size_t>(i)], max_word_length);
  return out;
}

// ------------------------------------------------------------------ DeckGroup

std::string to_string(DeckGroupKind kind) {
  switch (kind) {
    case DeckGroupKind::Integers: return "Z";
    case DeckGroupKind::Free: return "F";
    case DeckGroupKind::Symmetric: return "S";
    case DeckGroupKind::Semidirect: return "S_N x| F_g^N";
  }
  return "?";
}

DeckGroup DeckGroup::integers() { return DeckGroup(DeckGroupKind::Integers, 1, 0, kDefaultMaxWordLength); }

DeckGroup DeckGroup::free(int generators, int max_word_length) {
  if (generators < 1) throw DomainError("DeckGroup::free: need at least one generator");
  if (max_word_length < 1) throw DomainError("DeckGroup::free: max word length must be positive");
  return DeckGroup(DeckGroupKind::Free, generators, 0, max_word_length);
}

DeckGroup DeckGroup::symmetric(int particles) {
  if (particles < 1) throw DomainError("DeckGroup::symmetric: need N >= 1");
  return DeckGroup(DeckGroupKind::Symmetric, 0, particles, kDefaultMaxWordLength);
}

DeckGroup DeckGroup::semidirect(int particles, int generators, int max_word_length) {
  if (particles < 1 || generators < 1) throw DomainError("DeckGroup::semidirect: need N >= 1 and g >= 1");
  return DeckGroup(DeckGroupKind::Semidirect, generators, particles, max_word_length);
}

namespace {

bool word_in_group(const FreeWord& w, int rank, int max_len) {
  return w.max_generator() <= rank && w.length() <= max_len;
}

}  // namespace

bool DeckGroup::contains(const DeckElement& s) const {
  switch (kind_) {
    case DeckGroupKind::Integers: return std::holds_alternative<Winding>(s);
    case DeckGroupKind::Free: {
      const auto* w = std::get_if<FreeWord>(&s);
      return w && word_in_group(*w, rank_, max_word_length_);
    }
    case DeckGroupKind::Symmetric: {
      const auto* p = std::get_if<Permutation>(&s);
      return p && p->size() == particles_;
    }
    case DeckGroupKind::Semidirect: {
      const auto* e = std::get_if<SemidirectElement>(&s);
      if (!e || e->perm.size() != particles_ || static_cast<int>(e->words.size()) != particles_) return false;
      return std::all_of(e->words.begin(), e->words.end(),
                         [&](const FreeWord& w) { return word_in_group(w, rank_, max_word_length_); });
    }
  }
  return false;
}

void DeckGroup::require(const DeckElement& s) const {
  if (!contains(s))
    throw DomainError("deck element " + to_string(s) + " does not belong to group " + describe());
}

DeckElement DeckGroup::identity() const {
  switch (kind_) {
    case DeckGroupKind::Integers: return Winding{0};
    case DeckGroupKind::Free: return FreeWord{};
    case DeckGroupKind::Symmetric: return Permutation::identity(particles_);
    case DeckGroupKind::Semidirect:
      return SemidirectElement{Permutation::identity(particles_),
                               std::vector<FreeWord>(static_cast<size_t>(particles_))};
  }
  return Winding{0};
}

DeckElement DeckGroup::compose(const DeckElement& s1, const DeckElement& s2) const {
  require(s1);
  require(s2);
  switch (kind_) {
    case DeckGroupKind::Integers:
      return Winding{std::get<Winding>(s1).turns + std::get<Winding>(s2).turns};
    case DeckGroupKind::Free: return std::get<FreeWord>(s1).times(std::get<FreeWord>(s2), max_word_length_);
    case DeckGroupKind::Symmetric: return std::get<Permutation>(s1) * std::get<Permutation>(s2);
    case DeckGroupKind::Semidirect:
      return semidirect_product(std::get<SemidirectElement>(s1), std::get<SemidirectElement>(s2),
                                max_word_length_);
  }
  return s1;
}

DeckElement DeckGroup::inverse(const DeckElement& s) const {
  require(s);
  switch (kind_) {
    case DeckGroupKind::Integers: return Winding{-std::get<Winding>(s).turns};
    case DeckGroupKind::Free: return std::get<FreeWord>(s).inverse();
    case DeckGroupKind::Symmetric: return std::get<Permutation>(s).inverse();
    case DeckGroupKind::Semidirect: {
      // (p,σ̃)⁻¹ = (p⁻¹, τ̃) with τ^{(i)} = (σ^{(p⁻¹(i))})⁻¹
      const auto& e = std::get<SemidirectElement>(s);
      SemidirectElement inv;
      inv.perm = e.perm.inverse();
      inv.words.resize(e.words.size());
      for (int i = 0; i < particles_; ++i)
        inv.words[static_cast<size_t>(i)] = e.words[static_cast<size_t>(inv.perm(i))].inverse();
      return inv;
    }
  }
  return s;
}

bool DeckGroup::is_identity(const DeckElement& s) const {
  return std::visit(
      [](const auto& e) -> bool {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Winding>) return e.turns == 0;
        else if constexpr (std::is_same_v<T, SemidirectElement>)
          return e.perm.is_identity() &&
                 std::all_of(e.words.begin(), e.words.end(), [](const FreeWord& w) { return w.is_identity(); });
        else
          return e.is_identity();
      },
      s);
}

namespace {

FreeWord random_word(Rng& rng, int rank, int max_length) {
  const int len = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_length) + 1));
  std::vector<int> letters;
  letters.reserve(static_cast<size_t>(len));
  while (static_cast<int>(letters.size()) < len) {
    const int g = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(rank)));
    const int l = (rng() & 1U) ? g : -g;
    if (!letters.empty() && letters.back() == -l) continue;
    letters.push_back(l);
  }
  return FreeWord::checked(std::move(letters), std::max(max_length, 1));
}

Permutation random_permutation(Rng& rng, int n) {
  std::vector<int> im(static_cast<size_t>(n));
  std::iota(im.begin(), im.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(im[static_cast<size_t>(i)],
              im[static_cast<size_t>(uniform_index(rng, static_cast<std::uint64_t>(i) + 1))]);
  return Permutation(std::move(im));
}

}  // namespace

DeckElement DeckGroup::random_element(Rng& rng, int max_length) const {
  switch (kind_) {
    case DeckGroupKind::Integers:
      return Winding{static_cast<long long>(uniform_index(rng, 2ULL * static_cast<std::uint64_t>(max_length) + 1)) -
                     max_length};
    case DeckGroupKind::Free: return random_word(rng, rank_, std::min(max_length, max_word_length_));
    case DeckGroupKind::Symmetric: return random_permutation(rng, particles_);
    case DeckGroupKind::Semidirect: {
      SemidirectElement e;
      e.perm = random_permutation(rng, particles_);
      for (int i = 0; i < particles_; ++i)
        e.words.push_back(random_word(rng, rank_, std::min(max_length, max_word_length_)));
      return e;
    }
  }
  return identity();
}

std::string DeckGroup::describe() const {
  switch (kind_) {
    case DeckGroupKind::Integers: return "Z";
    case DeckGroupKind::Free: return "F_" + std::to_string(rank_);
    case DeckGroupKind::Symmetric: return "S_" + std::to_string(particles_);
    case DeckGroupKind::Semidirect:
      return "S_" + std::to_string(particles_) + " x| F_" + std::to_string(rank_) + "^" + std::to_string(particles_);
  }
  return "?";
}

std::string to_string(const DeckElement& s) {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Winding>) {
          return "winding(" + std::to_string(e.turns) + ")";
        } else if constexpr (std::is_same_v<T, Permutation>) {
          std::string r = "perm[";
          for (int i = 0; i < e.size(); ++i) r += (i ? "," : "") + std::to_string(e(i));
          return r + "]";
        } else if constexpr (std::is_same_v<T, FreeWord>) {
          return "word(" + e.to_string() + ")";
        } else {
          std::string r = "(perm[";
          for (int i = 0; i < e.perm.size(); ++i) r += (i ? "," : "") + std::to_string(e.perm(i));
          r += "], (";
          for (size_t i = 0; i < e.words.size(); ++i) r += (i ? ", " : "") + e.words[i].to_string();
          return r + "))";
        }
      },
      s);
}

}  // namespace topobohm

namespace topobohm {

std::vector<DeckElement> generators(const DeckGroup& group) {
  std::vector<DeckElement> out;
  const int n = group.particles();
  switch (group.kind()) {
    case DeckGroupKind::Integers: out.emplace_back(Winding{1}); break;
    case DeckGroupKind::Free:
      for (int g = 1; g <= group.rank(); ++g) out.emplace_back(FreeWord::generator(g));
      break;
    case DeckGroupKind::Symmetric:
      for (int i = 0; i + 1 < n; ++i) out.emplace_back(Permutation::transposition(n, i, i + 1));
      break;
    case DeckGroupKind::Semidirect:
      for (int i = 0; i + 1 < n; ++i)
        out.emplace_back(SemidirectElement{Permutation::transposition(n, i, i + 1),
                                           std::vector<FreeWord>(static_cast<size_t>(n))});
      for (int i = 0; i < n; ++i)
        for (int g = 1; g <= group.rank(); ++g) {
          SemidirectElement e{Permutation::identity(n), std::vector<FreeWord>(static_cast<size_t>(n))};
          e.words[static_cast<size_t>(i)] = FreeWord::generator(g);
          out.emplace_back(std::move(e));
        }
      break;
  }
  return out;
}

std::vector<GeneratorPower> factorize(const DeckGroup& group, const DeckElement& s) {
  group.require(s);
  std::vector<GeneratorPower> out;
  switch (group.kind()) {
    case DeckGroupKind::Integers: {
      const long long k = std::get<Winding>(s).turns;
      for (long long i = 0; i < (k >= 0 ? k : -k); ++i) out.push_back({0, k >= 0 ? 1 : -1});
      break;
    }
    case DeckGroupKind::Free:
      for (int l : std::get<FreeWord>(s).letters()) out.push_back({std::abs(l) - 1, l > 0 ? 1 : -1});
      break;
    case DeckGroupKind::Symmetric:
      for (int i : std::get<Permutation>(s).adjacent_transpositions()) out.push_back({i, 1});
      break;
    case DeckGroupKind::Semidirect: {
      // (p, σ̃) = (p, ε)·(id, σ̃), and (id, σ̃) is a commuting product over particles.
      const auto& e = std::get<SemidirectElement>(s);
      const int n = group.particles();
      for (int i : e.perm.adjacent_transpositions()) out.push_back({i, 1});
      for (int i = 0; i < n; ++i)
        for (int l : e.words[static_cast<size_t>(i)].letters())
          out.push_back({(n - 1) + i * group.rank() + (std::abs(l) - 1), l > 0 ? 1 : -1});
      break;
    }
  }
  return out;
}

}  // namespace topobohm
