#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "topobohm/rng.hpp"

namespace topobohm {

inline constexpr int kDefaultMaxWordLength = 64;

/// Element of ℤ acting on the ring cover by whole turns.
struct Winding {
  long long turns = 0;
  friend bool operator==(const Winding&, const Winding&) = default;
  friend auto operator<=>(const Winding&, const Winding&) = default;
};

/// Bijection of {0, …, N−1}, stored as the image table i ↦ p(i). The product
/// p·q is composition p∘q (q applied first).
class Permutation {
 public:
  Permutation() = default;
  /// Throws DomainError unless `image` is a bijection of {0, …, N−1}.
  explicit Permutation(std::vector<int> image);

  static Permutation identity(int n);
  /// Swaps i and j (0-based).
  static Permutation transposition(int n, int i, int j);

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[static_cast<size_t>(i)]; }
  const std::vector<int>& image() const { return image_; }

  Permutation inverse() const;
  bool is_identity() const;
  /// +1 for even, −1 for odd permutations.
  int sign() const;
  /// Adjacent transpositions s_i = (i, i+1) whose product, left to right,
  /// equals this permutation. Indices are 0-based.
  std::vector<int> adjacent_transpositions() const;

  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

/// Reduced word in a free group. Letter +g denotes generator a_g (g ≥ 1) and
/// −g its inverse. Never contains an adjacent pair (g, −g).
class FreeWord {
 public:
  FreeWord() = default;

  /// Validates that `letters` is already reduced and within `max_length`.
  static FreeWord checked(std::vector<int> letters, int max_length = kDefaultMaxWordLength);
  /// Freely reduces `letters`, then checks the length cap.
  static FreeWord reduced(const std::vector<int>& letters, int max_length = kDefaultMaxWordLength);
  static FreeWord generator(int g, int power = 1);

  const std::vector<int>& letters() const { return letters_; }
  int length() const { return static_cast<int>(letters_.size()); }
  bool is_identity() const { return letters_.empty(); }
  /// Largest generator index used (0 for the identity).
  int max_generator() const;
  /// Total exponent of generator g.
  long long exponent_sum(int g) const;

  FreeWord inverse() const;
  /// Reduced product; throws DomainError if the result exceeds `max_length`.
  FreeWord times(const FreeWord& other, int max_length = kDefaultMaxWordLength) const;

  std::string to_string() const;

  friend bool operator==(const FreeWord&, const FreeWord&) = default;
  friend auto operator<=>(const FreeWord&, const FreeWord&) = default;

 private:
  std::vector<int> letters_;
};

/// Element (p, σ̃) of S_N ⋉ F_g^N, acting on N-tuples of cover points by
/// (σq̂)_i = σ^{(p⁻¹(i))} q̂_{p⁻¹(i)}.
struct SemidirectElement {
  Permutation perm;
  std::vector<FreeWord> words;
  friend bool operator==(const SemidirectElement&, const SemidirectElement&) = default;
  friend auto operator<=>(const SemidirectElement&, const SemidirectElement&) = default;
};

using DeckElement = std::variant<Winding, Permutation, FreeWord, SemidirectElement>;

enum class DeckGroupKind { Integers, Free, Symmetric, Semidirect };

std::string to_string(DeckGroupKind kind);

/// A covering group: ℤ, F_g, S_N, or S_N ⋉ F_g^N.
class DeckGroup {
 public:
  static DeckGroup integers();
  static DeckGroup free(int generators, int max_word_length = kDefaultMaxWordLength);
  static DeckGroup symmetric(int particles);
  static DeckGroup semidirect(int particles, int generators, int max_word_length = kDefaultMaxWordLength);

  DeckGroupKind kind() const { return kind_; }
  /// Number of free generators (1 for ℤ, 0 for S_N).
  int rank() const { return rank_; }
  /// N for S_N and the semidirect product, 0 otherwise.
  int particles() const { return particles_; }
  int max_word_length() const { return max_word_length_; }

  bool contains(const DeckElement& s) const;
  /// Throws DomainError if `s` does not belong to this group.
  void require(const DeckElement& s) const;

  DeckElement identity() const;
  /// Group product s1·s2. Mixed or foreign elements throw DomainError.
  DeckElement compose(const DeckElement& s1, const DeckElement& s2) const;
  DeckElement inverse(const DeckElement& s) const;
  bool is_identity(const DeckElement& s) const;

  /// Random element; words have length ≤ `max_length`, windings |k| ≤ max_length.
  DeckElement random_element(Rng& rng, int max_length) const;

  std::string describe() const;

  friend bool operator==(const DeckGroup&, const DeckGroup&) = default;

 private:
  DeckGroup(DeckGroupKind kind, int rank, int particles, int max_word_length)
      : kind_(kind), rank_(rank), particles_(particles), max_word_length_(max_word_length) {}

  DeckGroupKind kind_;
  int rank_;
  int particles_;
  int max_word_length_;
};

/// Semidirect product (p₁,σ̃₁)(p₂,σ̃₂) = (p₁p₂, p₂⁻¹σ̃₁p₂ · σ̃₂).
SemidirectElement semidirect_product(const SemidirectElement& a, const SemidirectElement& b,
                                     int max_word_length = kDefaultMaxWordLength);

std::string to_string(const DeckElement& s);

/// One factor g^{±1} of a generator word; `index` follows generators().
struct GeneratorPower {
  int index;
  int power;  // +1 or −1
};

/// Generators in a fixed order:
///   ℤ: {1};  F_g: {a_1 … a_g};  S_N: {s_1 … s_{N−1}} (adjacent transpositions);
///   S_N ⋉ F_g^N: {s_1 … s_{N−1}, a_1^{(1)} … a_g^{(1)}, …, a_1^{(N)} … a_g^{(N)}}.
std::vector<DeckElement> generators(const DeckGroup& group);

/// A word in generators() whose ordered product equals `s`.
std::vector<GeneratorPower> factorize(const DeckGroup& group, const DeckElement& s);

}  // namespace topobohm
