#include <doctest.h>

#include <cmath>

#include "topobohm/errors.hpp"
#include "topobohm/finite_group.hpp"
#include "topobohm/topofactor.hpp"

using namespace topobohm;

TEST_CASE("ring characters: gamma_k = e^{ik beta}") {
  const auto ch = ring_character(0.7);
  for (long long k : {-5LL, -1LL, 0LL, 3LL, 40LL}) {
    const cplx expect = std::polar(1.0, 0.7 * static_cast<double>(k));
    CHECK(std::abs(ch(Winding{k}) - expect) < 1e-12);
  }
  CHECK(ch.beta() == doctest::Approx(0.7));
  CHECK(ring_character(0.0).is_trivial());
}

TEST_CASE("characters reject non-unimodular values and broken relations") {
  CHECK_THROWS_AS(make_character(DeckGroup::integers(), {cplx(0.99, 0.0)}), DomainError);
  // In S_3, s1 and s2 are conjugate, so their values must agree.
  CHECK_THROWS_AS(make_character(DeckGroup::symmetric(3), {-1.0, 1.0}), DomainError);
  CHECK_NOTHROW(make_character(DeckGroup::symmetric(3), {-1.0, -1.0}));
  // Two-particle cover: the swap conjugates a^(1) into a^(2).
  CHECK_THROWS_AS(make_character(DeckGroup::semidirect(2, 1), {1.0, std::polar(1.0, 0.2), 1.0}), DomainError);
}

TEST_CASE("finite characters: counts match the abelianization order") {
  // S_n has two characters for n ≥ 2; ℤ_n has n.
  for (int n = 2; n <= 5; ++n) {
    const auto g = FinitePermGroup::symmetric(n);
    CHECK(g.abelianization_order() == 2);
    CHECK(enumerate_characters(g).size() == 2);
  }
  const auto z5 = FinitePermGroup::cyclic(5);
  CHECK(enumerate_characters(z5).size() == 5);
  CHECK(enumerate_characters(DeckGroup::symmetric(3)).size() == 2);
  CHECK_THROWS_AS(enumerate_characters(DeckGroup::integers()), DomainError);
}

TEST_CASE("S_N characters are the trivial and the sign character") {
  const auto g = DeckGroup::symmetric(4);
  bool saw_sign = false, saw_trivial = false;
  for (const auto& ch : enumerate_characters(g)) {
    const cplx v = ch(Permutation::transposition(4, 0, 2));
    if (std::abs(v + 1.0) < 1e-12) saw_sign = true;
    if (std::abs(v - 1.0) < 1e-12) saw_trivial = true;
  }
  CHECK(saw_sign);
  CHECK(saw_trivial);
}

TEST_CASE("Aharonov-Casher factor is exp(-i angle e.sigma)") {
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 2), 0.4);
  const CMatrix g = ac.generator_matrices().front();
  CHECK(std::abs(g(0, 0) - std::polar(1.0, -0.4)) < 1e-14);
  CHECK(std::abs(g(1, 1) - std::polar(1.0, 0.4)) < 1e-14);
  const CMatrix g3 = ac(Winding{3});
  CHECK(std::abs(g3(0, 0) - std::polar(1.0, -1.2)) < 1e-13);
  CHECK_FALSE(ac.is_scalar());
}

TEST_CASE("commutation gate") {
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 1.0);
  const std::vector<CMatrix> sz{pauli::z(), 2.0 * CMatrix::Identity(2, 2)};
  const std::vector<CMatrix> sx{pauli::x()};
  CHECK(check_commutes(ac, sz));
  CHECK_FALSE(check_commutes(ac, sx));
  // [e^{-iσz}, σx] has entries ±2i·sin(1)... max entry 2 sin(1).
  CHECK(commutation_residual(ac, sx) == doctest::Approx(2 * std::sin(1.0)));
  MatrixRep certified = ac;
  CHECK(check_commutes(certified, sz));
  CHECK(certified.commuting_certificate().size() == 2);
  const CMatrix nonherm = CMatrix::Identity(2, 2) * cplx(0, 1);
  CHECK_THROWS_AS(check_commutes(ac, std::vector<CMatrix>{nonherm}), DomainError);
}

TEST_CASE("classification C0 / C1 / C2") {
  const std::vector<CMatrix> zero{CMatrix::Zero(2, 2)};
  CHECK(classify_dynamics(MatrixRep(), std::vector<CMatrix>{CMatrix::Zero(1, 1)}).label == DynamicsClass::C0);
  CHECK(classify_dynamics(ring_character(0.5), std::vector<CMatrix>{CMatrix::Zero(1, 1)}).label == DynamicsClass::C1);
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 1.0);
  const auto c = classify_dynamics(ac, zero);
  CHECK(c.label == DynamicsClass::C2);
  CHECK(c.compatible);
  CHECK(c.verdict.find("not given by a character") != std::string::npos);

  // σx and σz generate all of End(C²).
  const std::vector<CMatrix> generic{pauli::x(), pauli::z()};
  CHECK(generated_algebra_dimension(generic) == 4);
  const auto bad = classify_dynamics(ac, generic);
  CHECK_FALSE(bad.compatible);
  CHECK(bad.algebra_spans_full);
}

TEST_CASE("character decomposition of an abelian factor") {
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(1, 0, 0), 0.3);
  const auto sectors = decompose_by_character(ac);
  REQUIRE(sectors.size() == 2);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& s : sectors) {
    sum += s.character(Winding{1}) * s.projector();
  }
  CHECK(max_abs(sum - ac.generator_matrices().front()) < 1e-12);
  const auto f2 = DeckGroup::free(2);
  const auto noncomm = make_matrix_rep(f2, {pauli::x(), pauli::z()});
  CHECK_THROWS_AS(decompose_by_character(noncomm), IncompatibleFactorError);
}

TEST_CASE("tensor permutation and N-fermion factor") {
  // Swap on C²⊗C² maps e0⊗e1 to e1⊗e0.
  const CMatrix p = tensor_permutation(Permutation::transposition(2, 0, 1), 2);
  CHECK(std::abs(p(2, 1) - 1.0) < 1e-15);
  CHECK(std::abs(p(1, 2) - 1.0) < 1e-15);
  CHECK(std::abs(p(0, 0) - 1.0) < 1e-15);

  const CMatrix g = spin_rotation(Eigen::Vector3d(0, 1, 0), 0.5);
  const std::vector<CMatrix> gens{g};
  const SemidirectElement s{Permutation::identity(2), {FreeWord::generator(1), FreeWord()}};
  CHECK(max_abs(nfermion_factor(2, 2, gens, s) - kron(g, CMatrix::Identity(2, 2))) < 1e-14);
  const SemidirectElement swap{Permutation::transposition(2, 0, 1), {FreeWord(), FreeWord()}};
  CHECK(max_abs(nfermion_factor(2, 2, gens, swap) + CMatrix::Identity(4, 4)) < 1e-14);
}

TEST_CASE("twisted composition law holds and detects corruption") {
  const std::vector<CMatrix> gens{spin_rotation(Eigen::Vector3d(0, 1, 1), 0.9)};
  auto table = TwistedRepTable::nfermion(2, gens, 4);
  CHECK(verify_twisted_law(table, 300, 1) <= 1e-12);
  const auto plain = TwistedRepTable::from_matrix_rep(aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 0.3), 6);
  CHECK(verify_twisted_law(plain, 300, 2) <= 1e-12);

  const auto victim = table.sample_pool()[1];
  auto e = table.at(victim);
  e.factor = e.factor * spin_rotation(Eigen::Vector3d(1, 0, 0), 0.01);
  table.set(victim, e);
  CHECK(verify_twisted_law(table, 300, 1) > 1e-4);
}

TEST_CASE("covariant potentials") {
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 0.8);
  const CMatrix g = ac.generator_matrices().front();
  CoverMatrixField f{{0, 1}, {{pauli::x()}, {g * pauli::x() * g.adjoint()}}};
  CHECK(covariance_residual(f, ac) < 1e-14);
  CHECK(check_covariant_potential(f, ac, 1e-12));
  f.values[1][0] = pauli::x();
  CHECK_FALSE(check_covariant_potential(f, ac, 1e-12));
}
