#include <doctest.h>

#include <cmath>

#include "topobohm/covering.hpp"
#include "topobohm/errors.hpp"
#include "topobohm/linalg.hpp"

using namespace topobohm;

TEST_CASE("permutations: sign, inverse and composition order") {
  const Permutation p({1, 2, 0});  // 3-cycle, even
  const Permutation t = Permutation::transposition(3, 0, 1);
  CHECK(p.sign() == 1);
  CHECK(t.sign() == -1);
  CHECK((p * p.inverse()).is_identity());
  // (p∘t)(0) = p(t(0)) = p(1) = 2
  CHECK((p * t)(0) == 2);
  CHECK_THROWS_AS(Permutation({0, 0, 1}), DomainError);

  Permutation prod = Permutation::identity(4);
  const Permutation q({3, 0, 2, 1});
  for (int i : q.adjacent_transpositions()) prod = prod * Permutation::transposition(4, i, i + 1);
  CHECK(prod == q);
}

TEST_CASE("free words reduce and respect the length cap") {
  const auto w = FreeWord::reduced({1, 2, -2, -1, 1});
  CHECK(w.letters() == std::vector<int>{1});
  CHECK_THROWS_AS(FreeWord::checked({1, -1}), DomainError);
  CHECK(FreeWord::generator(2, 3).exponent_sum(2) == 3);
  CHECK(FreeWord::generator(1, 3).times(FreeWord::generator(1, -3)).is_identity());
  CHECK_THROWS_AS(FreeWord::generator(1, 3).times(FreeWord::generator(1, 3), 4), DomainError);
}

TEST_CASE("ring deck action shifts sheets and projects back") {
  const auto ring = CoveringSpace::ring();
  const CoverPoint q = RingPoint{0, 1.25};
  const auto moved = std::get<RingPoint>(ring.deck_apply(Winding{2}, q));
  CHECK(moved.sheet == 2);
  CHECK(moved.angle == doctest::Approx(1.25));
  CHECK(ring.project(moved)[0] == doctest::Approx(1.25));
  CHECK_THROWS(ring.deck_apply(Winding{9}, q));

  const auto p = RingPoint::from_unwrapped(-0.5);
  CHECK(p.sheet == -1);
  CHECK(p.angle == doctest::Approx(kTwoPi - 0.5));
  CHECK(p.unwrapped() == doctest::Approx(-0.5));
}

TEST_CASE("two-particle cover: the swap exchanges the tuple entries") {
  const auto cover = CoveringSpace::two_particle_ring();
  const CoverPoint q = RingTuple{{RingPoint{0, 0.5}, RingPoint{1, 2.0}}};
  const SemidirectElement swap{Permutation::transposition(2, 0, 1), {FreeWord(), FreeWord()}};
  const auto out = std::get<RingTuple>(cover.deck_apply(swap, q));
  CHECK(out.particles[0] == RingPoint{1, 2.0});
  CHECK(out.particles[1] == RingPoint{0, 0.5});
}

TEST_CASE("deck groups: compose with inverse gives the identity") {
  Rng rng(3);
  for (const auto& g : {DeckGroup::integers(), DeckGroup::free(2), DeckGroup::symmetric(4), DeckGroup::semidirect(2, 1)}) {
    for (int i = 0; i < 50; ++i) {
      const auto s = g.random_element(rng, 5);
      CHECK(g.is_identity(g.compose(s, g.inverse(s))));
    }
  }
  CHECK_THROWS_AS(DeckGroup::integers().compose(Winding{1}, Permutation::identity(2)), DomainError);
}

TEST_CASE("factorize reproduces the element from generators") {
  Rng rng(11);
  const auto g = DeckGroup::semidirect(3, 1);
  const auto gens = generators(g);
  for (int i = 0; i < 30; ++i) {
    const auto s = g.random_element(rng, 4);
    DeckElement acc = g.identity();
    for (const auto& gp : factorize(g, s)) {
      const auto& x = gens[static_cast<size_t>(gp.index)];
      acc = g.compose(acc, gp.power > 0 ? x : g.inverse(x));
    }
    CHECK(acc == s);
  }
}

TEST_CASE("semidirect product conjugates the words by the second permutation") {
  // (p₁, σ̃₁)(p₂, σ̃₂) = (p₁p₂, p₂⁻¹σ̃₁p₂ · σ̃₂) with swap p₂: words trade places.
  const SemidirectElement a{Permutation::identity(2), {FreeWord::generator(1), FreeWord()}};
  const SemidirectElement b{Permutation::transposition(2, 0, 1), {FreeWord(), FreeWord()}};
  const auto ab = semidirect_product(a, b);
  CHECK(ab.perm == b.perm);
  CHECK(ab.words[0].is_identity());
  CHECK(ab.words[1] == FreeWord::generator(1));
}

TEST_CASE("projectability of sheet samples") {
  SheetSamples f{{-1, 0, 1}, {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0 + 1e-6}}};
  CHECK(projectability_residual(f) == doctest::Approx(1e-6));
  CHECK(is_projectable_field(f, 1e-5));
  CHECK_FALSE(is_projectable_field(f, 1e-7));
  CHECK_THROWS_AS(project_density(f, 1e-9), NonProjectableError);
  SheetSamples one{{0}, {{1.0}}};
  CHECK_THROWS_AS(projectability_residual(one), DomainError);

  SheetSamples rho{{0, 1}, {{1.0, 3.0}, {1.0, 3.0}}};
  const auto d = project_density(rho);
  // Σρ·Δθ = 1 with Δθ = π.
  CHECK((d[0] + d[1]) * kPi == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(3 * d[0]));
}

TEST_CASE("free action check") {
  const auto ring = CoveringSpace::ring();
  const std::vector<DeckElement> els{Winding{0}, Winding{1}};
  const std::vector<CoverPoint> pts{RingPoint{0, 0.1}};
  CHECK(ring.acts_freely(els, pts));
}
