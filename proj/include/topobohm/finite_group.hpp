#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "topobohm/deck.hpp"

namespace topobohm {

/// Finite permutation group given by generators, enumerated by closure.
class FinitePermGroup {
 public:
  static constexpr std::size_t kDefaultOrderCap = 10000;

  /// Throws DomainError if the closure exceeds `order_cap` elements.
  explicit FinitePermGroup(std::vector<Permutation> generators, std::size_t order_cap = kDefaultOrderCap);

  /// S_n with the Coxeter generators s_i = (i, i+1).
  static FinitePermGroup symmetric(int n);
  /// ℤ_n generated by the n-cycle.
  static FinitePermGroup cyclic(int n);

  const std::vector<Permutation>& generators() const { return generators_; }
  const std::vector<Permutation>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }
  /// Index of an element in elements(); throws if absent.
  std::size_t index_of(const Permutation& p) const;

  /// Order of the commutator subgroup [G, G], by closure of all commutators.
  std::size_t commutator_subgroup_order() const;
  /// |G / [G, G]|, which equals the number of characters of G.
  std::size_t abelianization_order() const;

 private:
  std::vector<Permutation> generators_;
  std::vector<Permutation> elements_;
  std::map<Permutation, std::size_t> index_;
};

/// A homomorphism G → U(1) on a finite group: values on the generators and on
/// every element (in FinitePermGroup::elements() order).
struct FiniteCharacter {
  std::vector<std::complex<double>> generator_values;
  std::vector<std::complex<double>> element_values;
};

/// All characters of a finite group (order ≤ 10⁴), deduplicated. Candidate
/// generator images range over the |G^ab|-th roots of unity; each candidate is
/// accepted iff it extends consistently along every edge of the Cayley graph.
std::vector<FiniteCharacter> enumerate_characters(const FinitePermGroup& group);

}  // namespace topobohm
