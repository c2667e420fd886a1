#include "topobohm/finite_group.hpp"

#include <cmath>
#include <deque>
#include <numeric>

#include "topobohm/errors.hpp"
#include "topobohm/linalg.hpp"

namespace topobohm {

namespace {

std::vector<Permutation> closure(const std::vector<Permutation>& gens, int n, std::size_t cap) {
  std::vector<Permutation> elems{Permutation::identity(n)};
  std::map<Permutation, std::size_t> seen{{elems.front(), 0}};
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const Permutation g = elems[queue.front()];
    queue.pop_front();
    for (const auto& s : gens) {
      Permutation h = g * s;
      if (seen.contains(h)) continue;
      if (elems.size() >= cap) throw DomainError("finite group exceeds the order cap of " + std::to_string(cap));
      seen.emplace(h, elems.size());
      queue.push_back(elems.size());
      elems.push_back(std::move(h));
    }
  }
  return elems;
}

}  // namespace

FinitePermGroup::FinitePermGroup(std::vector<Permutation> generators, std::size_t order_cap)
    : generators_(std::move(generators)) {
  if (generators_.empty()) throw DomainError("FinitePermGroup: need at least one generator");
  const int n = generators_.front().size();
  for (const auto& g : generators_)
    if (g.size() != n) throw DomainError("FinitePermGroup: generators act on different sets");
  elements_ = closure(generators_, n, order_cap);
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

FinitePermGroup FinitePermGroup::symmetric(int n) {
  if (n < 2) throw DomainError("symmetric group needs n >= 2");
  std::vector<Permutation> gens;
  for (int i = 0; i + 1 < n; ++i) gens.push_back(Permutation::transposition(n, i, i + 1));
  return FinitePermGroup(std::move(gens));
}

FinitePermGroup FinitePermGroup::cyclic(int n) {
  if (n < 1) throw DomainError("cyclic group needs n >= 1");
  std::vector<int> im(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) im[static_cast<size_t>(i)] = (i + 1) % n;
  return FinitePermGroup({Permutation(std::move(im))});
}

std::size_t FinitePermGroup::index_of(const Permutation& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) throw DomainError("element not in group");
  return it->second;
}

std::size_t FinitePermGroup::commutator_subgroup_order() const {
  // [G, G] is the normal closure of the generator commutators.
  const int n = elements_.front().size();
  std::vector<Permutation> gens;
  for (const auto& a : generators_)
    for (const auto& b : generators_) gens.push_back(a.inverse() * b.inverse() * a * b);
  for (;;) {
    const auto sub = closure(gens, n, elements_.size());
    std::map<Permutation, char> members;
    for (const auto& h : sub) members.emplace(h, 0);
    bool grown = false;
    for (const auto& s : generators_) {
      for (const auto& h : std::vector<Permutation>(gens)) {
        Permutation c = s.inverse() * h * s;
        if (!members.contains(c)) {
          gens.push_back(std::move(c));
          grown = true;
        }
      }
    }
    if (!grown) return sub.size();
  }
}

std::size_t FinitePermGroup::abelianization_order() const { return order() / commutator_subgroup_order(); }

std::vector<FiniteCharacter> enumerate_characters(const FinitePermGroup& group) {
  const std::size_t m = group.abelianization_order();
  const auto& gens = group.generators();
  const auto& elems = group.elements();
  std::vector<cplx> roots(m);
  for (std::size_t j = 0; j < m; ++j) roots[j] = std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(m));

  std::vector<std::size_t> gen_index(gens.size());
  for (std::size_t g = 0; g < gens.size(); ++g) gen_index[g] = group.index_of(gens[g]);
  // Cayley graph: right multiplication by each generator.
  std::vector<std::vector<std::size_t>> edge(elems.size(), std::vector<std::size_t>(gens.size()));
  for (std::size_t e = 0; e < elems.size(); ++e)
    for (std::size_t g = 0; g < gens.size(); ++g) edge[e][g] = group.index_of(elems[e] * gens[g]);

  std::vector<FiniteCharacter> found;
  std::vector<std::size_t> choice(gens.size(), 0);
  constexpr double tol = 1e-9;
  for (;;) {
    // Propagate values from the identity along the Cayley graph; any
    // disagreement means the candidate violates a relation.
    std::vector<cplx> value(elems.size());
    std::vector<char> set(elems.size(), 0);
    value[0] = 1.0;
    set[0] = 1;
    std::deque<std::size_t> queue{0};
    bool ok = true;
    while (!queue.empty() && ok) {
      const std::size_t e = queue.front();
      queue.pop_front();
      for (std::size_t g = 0; g < gens.size() && ok; ++g) {
        const cplx v = value[e] * roots[choice[g]];
        const std::size_t f = edge[e][g];
        if (!set[f]) {
          set[f] = 1;
          value[f] = v;
          queue.push_back(f);
        } else if (std::abs(value[f] - v) > tol) {
          ok = false;
        }
      }
    }
    if (ok) {
      FiniteCharacter ch;
      for (std::size_t g = 0; g < gens.size(); ++g) ch.generator_values.push_back(value[gen_index[g]]);
      ch.element_values = std::move(value);
      bool duplicate = false;
      for (const auto& other : found) {
        double d = 0.0;
        for (std::size_t e = 0; e < elems.size(); ++e) d = std::max(d, std::abs(other.element_values[e] - ch.element_values[e]));
        if (d <= tol) duplicate = true;
      }
      if (!duplicate) found.push_back(std::move(ch));
    }
    // Next candidate (odometer over generator images).
    std::size_t g = 0;
    while (g < choice.size() && ++choice[g] == m) choice[g++] = 0;
    if (g == choice.size()) break;
  }
  if (found.size() != m)
    throw std::logic_error("character census disagrees with the abelianization order");
  return found;
}

}  // namespace topobohm
