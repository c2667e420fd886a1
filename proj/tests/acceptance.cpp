// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "topobohm/bohm.hpp"
#include "topobohm/ensemble.hpp"
#include "topobohm/errors.hpp"
#include "topobohm/grw.hpp"
#include "topobohm/reference.hpp"
#include "topobohm/runner.hpp"
#include "topobohm/states.hpp"
#include "topobohm/topofactor.hpp"

using namespace topobohm;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Free twisted ring levels (m + β/2π)²/2, sorted.
std::vector<double> free_levels(double beta, int count) {
  std::vector<double> e;
  for (int m = -count; m <= count; ++m) {
    const double k = m + beta / kTwoPi;
    e.push_back(0.5 * k * k);
  }
  std::sort(e.begin(), e.end());
  e.resize(static_cast<size_t>(count));
  return e;
}

Potential cosine_potential(int n, double amp) {
  return Potential::from_scalar(sample_grid(n, [amp](double t) { return amp * std::cos(t); }));
}

double max_set_difference(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// ---------------------------------------------------------------------------

Verdict twisted_spectrum() {
  const int n = 256, levels = 8;
  double worst = 0.0;
  bool degenerate = false;
  for (double beta : {0.0, kPi / 2, kPi}) {
    const auto ev = spectrum(n, scalar_rep(ring_character(beta), 1), Potential::zero(n), levels);
    const auto exact = free_levels(beta, levels);
    for (int i = 0; i < levels; ++i) {
      const double e = exact[static_cast<size_t>(i)];
      const double err = std::abs(ev[static_cast<size_t>(i)] - e) / (e == 0.0 ? 1.0 : e);
      worst = std::max(worst, err);
    }
    if (beta == kPi) degenerate = std::abs(ev[0] - 0.125) <= 1e-8 * 0.125 && std::abs(ev[1] - 0.125) <= 1e-8 * 0.125;
  }
  return {worst <= 1e-8 && degenerate,
          fmt("max relative error %.2e (tol 1e-8); beta=pi ground level 0.125 doubly degenerate: %s", worst,
              degenerate ? "yes" : "no")};
}

Verdict gauge_equivalence() {
  const int n = 256;
  const double flux = kPi, charge = 1.0, dt = 1e-3, t_end = 1.0;
  const Potential v = cosine_potential(n, 0.5);
  const WaveGrid plain = wrapped_gaussian(n, kPi, 0.5, 1.0, 0.0);
  const WaveGrid a_gauge = with_vector_potential(plain, flux, charge);

  // ψ' = e^{−ieAθ}ψ_A sampled on the sheet [0, 2π), embedded with γ = e^{−ieΦ}.
  std::vector<cplx> psi(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    psi[static_cast<size_t>(j)] = std::polar(1.0, -charge * flux / kTwoPi * plain.theta(j)) * plain.at(0, j);
  const WaveGrid twisted = twist_embed(psi, ring_character(wrap_phase(-charge * flux)), EmbedInput::cover_sheet);

  std::vector<double> q0;
  const GridDensity rho = GridDensity::of(plain);
  for (int i = 0; i < 32; ++i) q0.push_back(rho.quantile((i + 0.5) / 32));
  const auto ta = integrate_trajectories(a_gauge, v, q0, dt, t_end);
  const auto tt = integrate_trajectories(twisted, v, q0, dt, t_end);
  double dev = 0.0;
  for (size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].size() != tt[i].size() || ta[i].status != TrajectoryStatus::completed) dev = INFINITY;
    for (size_t s = 0; s < std::min(ta[i].size(), tt[i].size()); ++s)
      dev = std::max(dev, std::abs(ta[i].coord(s) - tt[i].coord(s)));
  }
  const double ds = max_set_difference(spectrum_flux(n, flux, charge, v, 8), spectrum(n, twisted.factor, v, 8));
  return {dev <= 1e-6 && ds <= 1e-10,
          fmt("trajectory deviation %.2e (tol 1e-6); spectrum difference %.2e (tol 1e-10)", dev, ds)};
}

Verdict flux_periodicity() {
  const int n = 256;
  const Potential v = cosine_potential(n, 0.7);
  double worst = 0.0;
  for (double flux : {0.3, kPi, 2.0}) worst = std::max(worst, max_set_difference(spectrum_flux(n, flux, 1.0, v, 8),
                                                                                 spectrum_flux(n, flux + kTwoPi, 1.0, v, 8)));
  return {worst <= 1e-10, fmt("max level difference Phi vs Phi+2pi %.2e (tol 1e-10)", worst)};
}

Verdict character_laws() {
  struct Case {
    DeckGroup group;
    Character ch;
  };
  const auto s3 = DeckGroup::symmetric(3);
  std::vector<Case> cases{
      {DeckGroup::integers(), ring_character(0.9)},
      {DeckGroup::free(2), make_character(DeckGroup::free(2), {std::polar(1.0, 0.3), std::polar(1.0, -1.1)})},
      {s3, make_character(s3, {-1.0, -1.0})},
      {DeckGroup::semidirect(2, 1),
       make_character(DeckGroup::semidirect(2, 1), {-1.0, std::polar(1.0, 0.4), std::polar(1.0, 0.4)})},
  };
  Rng rng(20241);
  double worst = 0.0;
  for (const auto& c : cases)
    for (int i = 0; i < 1000; ++i) {
      const auto a = c.group.random_element(rng, 6);
      const auto b = c.group.random_element(rng, 6);
      worst = std::max(worst, std::abs(c.ch(c.group.compose(a, b)) - c.ch(a) * c.ch(b)));
    }
  bool rejected = false;
  try {
    make_character(DeckGroup::integers(), {cplx(1.01, 0.0)});
  } catch (const DomainError&) {
    rejected = true;
  }
  return {worst <= 1e-12 && rejected,
          fmt("homomorphism residual %.2e over 4x1000 pairs (tol 1e-12); |gamma|=1.01 rejected: %s", worst,
              rejected ? "yes" : "no")};
}

Verdict character_census() {
  const size_t c3 = enumerate_characters(DeckGroup::symmetric(3)).size();
  const size_t c4 = enumerate_characters(DeckGroup::symmetric(4)).size();
  return {c3 == 2 && c4 == 2, fmt("S3: %zu characters, S4: %zu characters (expected 2 each)", c3, c4)};
}

Verdict twisted_composition() {
  const std::vector<CMatrix> gens{spin_rotation(Eigen::Vector3d(1, 1, 0), 0.7)};
  auto table = TwistedRepTable::nfermion(2, gens, 4);
  const double r = verify_twisted_law(table, 1000, 77);
  const auto& pool = table.sample_pool();
  auto e = table.at(pool[1]);
  e.factor *= -1.0;
  table.set(pool[1], e);
  const double rc = verify_twisted_law(table, 1000, 77);
  return {r <= 1e-12 && rc > 1e-3,
          fmt("residual %.2e over 1000 pairs (tol 1e-12); corrupted table residual %.2e (must exceed 1e-3)", r, rc)};
}

Verdict commutation_gate() {
  const auto out = std::filesystem::temp_directory_path() / "topobohm-acceptance-gate";
  const nlohmann::json cfg = {{"schema", "topobohm.scenario/1"},
                              {"factor", {{"kind", "aharonov_casher"}, {"axis", {0, 0, 1}}, {"angle", 1.0}}},
                              {"potential", {{"kind", "pauli"}, {"coefficients", {0, 1, 0, 0}}}},
                              {"numerics", {{"T", 0.01}}}};
  const int code = run_command("evolve", cfg, out).exit_code;

  const int n = 64;
  const MatrixRep ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 1.0);
  const WaveGrid profile = von_mises(n, kPi, 1.0, 0, 0.0);
  std::vector<cplx> values(2 * static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    values[static_cast<size_t>(j)] = profile.at(0, j) * 0.8;
    values[static_cast<size_t>(n + j)] = profile.at(0, j) * 0.6;
  }
  WaveGrid s = twist_embed(values, 2, ac);
  const Propagator prop(s, Potential::from_scalar(sample_grid(n, [](double t) { return std::cos(t); }), 2), 1e-3);
  double twist = 0.0;
  for (int block = 0; block < 100; ++block) {
    prop.advance(s, 100);
    twist = std::max(twist, twist_residual(s));
  }

  std::vector<CMatrix> sx(static_cast<size_t>(n), pauli::x());
  CoverSheetIntegrator ref(twist_embed(values, 2, ac), Potential::from_matrices(sx), 1e-3);
  double broken = 0.0;
  for (int i = 0; i < 100; ++i) {
    ref.step();
    broken = std::max(broken, ref.twist_residual());
  }
  return {code == 3 && twist <= 1e-9 && broken > 1e-3,
          fmt("sigma_x potential exit code %d (expected 3); scalar potential twist residual %.2e over 1e4 steps "
              "(tol 1e-9); ungauged reference residual %.2e within 100 steps (must exceed 1e-3)",
              code, twist, broken)};
}

Verdict equivariance() {
  const int samples = 10000;
  EquivarianceSetup setup{wrapped_gaussian(128, kPi, 0.5, 2.0, kPi), Potential::zero(128), 1e-3, {}, 64};
  const std::vector<double> cps{0.25, 0.5, 1.0};
  const auto rep = verify_equivariance(setup, samples, cps, 4242);
  setup.options.velocity_scale = -1.0;
  const auto flipped = verify_equivariance(setup, samples, cps, 4242);
  double tv = 0.0, tv_flip = 0.0;
  for (const auto& c : rep.checkpoints) tv = std::max(tv, c.tv);
  for (const auto& c : flipped.checkpoints) tv_flip = std::max(tv_flip, c.tv);
  const double threshold = 0.03 + 2.0 * std::sqrt(64.0 / samples);
  return {rep.valid && tv <= threshold && tv_flip > 0.2,
          fmt("max TV %.4f (tol %.4f), halted %.4f; sign-flipped control TV %.4f (must exceed 0.2)", tv, threshold,
              rep.halted_fraction, tv_flip)};
}

Verdict unitarity_symmetry() {
  WaveGrid s = wrapped_gaussian(256, 1.0, 0.4, 3.0, 1.3);
  const Propagator prop(s, cosine_potential(256, 2.0), 1e-3);
  double drift = 0.0;
  for (int block = 0; block < 100; ++block) {
    prop.advance(s, 100);
    drift = std::max(drift, std::abs(s.norm() * s.norm() - 1.0));
  }

  const int n = 64;
  const double beta = 0.4;
  TorusGrid t = torus_pair(n, -1, beta, von_mises(n, 1.0, 1.5, 0, beta).chi, von_mises(n, 4.0, 1.0, 1, beta).chi);
  std::vector<double> v(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(i * n + j)] = std::cos(t.dtheta() * i) + std::cos(t.dtheta() * j) +
                                          0.5 * std::cos(t.dtheta() * (i - j));
  const TorusPropagator tp(t, v, 1e-3);
  double exch = 0.0, diag = 0.0;
  for (int i = 0; i < 1000; ++i) {
    tp.step(t);
    if (i % 10 == 9) {
      exch = std::max(exch, exchange_residual(t));
      diag = std::max(diag, diagonal_residual(t));
    }
  }
  return {drift <= 1e-7 && exch <= 1e-9 && diag <= 1e-9,
          fmt("norm drift %.2e over 1e4 steps (tol 1e-7); antisymmetry residual %.2e, diagonal |chi| %.2e over "
              "1e3 steps (tol 1e-9)",
              drift, exch, diag)};
}

Verdict grw() {
  const double lambda = 1.0, a = 0.3;
  // Total rate λ∫f_x dx: the geodesic Gaussian integrates to √(2π)a·erf(π/(√2a)).
  const double total_rate = lambda * std::sqrt(kTwoPi) * a * boost::math::erf(kPi / (std::sqrt(2.0) * a));
  const double t_end = 6.65;
  const double mu = total_rate * t_end;
  const int runs = 200;
  const WaveGrid psi0 = wrapped_gaussian(64, kPi, 0.6, 1.0, kPi);
  const Potential v = cosine_potential(64, 0.5);
  std::vector<int> counts(static_cast<size_t>(runs));
  double twist = 0.0;
  for (int r = 0; r < runs; ++r) {
    const auto run = simulate_grw(psi0, v, 6.65e-3, t_end, {lambda, a, false}, 1000 + static_cast<std::uint64_t>(r));
    counts[static_cast<size_t>(r)] = static_cast<int>(run.events.size());
    for (const auto& e : run.events) twist = std::max(twist, e.twist_residual);
  }
  // Pearson χ² against Poisson(μ) over the cells ≤2, 3, …, 7, ≥8.
  auto pmf = [mu](int k) { return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0)); };
  std::vector<double> expected, observed;
  double low = 0.0;
  for (int k = 0; k <= 2; ++k) low += pmf(k);
  expected.push_back(low);
  for (int k = 3; k <= 7; ++k) expected.push_back(pmf(k));
  double tail = 1.0;
  for (double p : expected) tail -= p;
  expected.push_back(tail);
  observed.assign(expected.size(), 0.0);
  for (int c : counts) observed[static_cast<size_t>(std::clamp(c - 2, 0, 6))] += 1.0;
  double chi2 = 0.0;
  for (size_t i = 0; i < expected.size(); ++i) {
    const double e = expected[i] * runs;
    chi2 += (observed[i] - e) * (observed[i] - e) / e;
  }
  const double p = boost::math::gamma_q((expected.size() - 1) / 2.0, chi2 / 2.0);
  double mean = 0.0;
  for (int c : counts) mean += c;
  mean /= runs;

  // Collapses on an antisymmetric pair state keep the exchange sector.
  const int n = 64;
  TorusGrid pair = torus_pair(n, -1, 0.0, von_mises(n, 1.0, 1.5, 0, 0.0).chi, von_mises(n, 4.0, 1.0, 1, 0.0).chi);
  Rng rng(5);
  double exch = 0.0;
  for (int i = 0; i < 50; ++i) {
    pair = apply_collapse(pair, kTwoPi * uniform01(rng), lambda, a);
    exch = std::max(exch, exchange_residual(pair));
  }
  return {p > 1e-3 && twist <= 1e-9 && exch <= 1e-9,
          fmt("mean events %.3f (Poisson mean %.3f), chi2 %.2f, p = %.4f (must exceed 0.001); twist residual "
              "%.2e, exchange residual %.2e per collapse (tol 1e-9)",
              mean, mu, chi2, p, twist, exch)};
}

Verdict cross_integrator() {
  const int n = 64;
  const double dt = 1e-3;
  const std::vector<double> v = sample_grid(n, [](double t) { return 0.5 * std::cos(t); });
  WaveGrid a = von_mises(n, kPi, 1.0, 0, 0.0);
  WaveGrid b = a;
  Propagator(a, Potential::from_scalar(v), dt).advance(a, 1000);
  CrankNicolson(n, v, dt).advance(b, 1000);
  double l2 = 0.0;
  for (int j = 0; j < n; ++j) l2 += std::norm(a.at(0, j) - b.at(0, j)) * a.dtheta();
  l2 = std::sqrt(l2);
  return {l2 <= 1e-6, fmt("L2 difference split-step vs Crank-Nicolson at t=1: %.2e (tol 1e-6)", l2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"twisted-spectrum", twisted_spectrum},       {"gauge-equivalence", gauge_equivalence},
      {"flux-periodicity", flux_periodicity},       {"character-laws", character_laws},
      {"character-census", character_census},       {"twisted-composition", twisted_composition},
      {"commutation-gate", commutation_gate},       {"equivariance", equivariance},
      {"unitarity-symmetry", unitarity_symmetry},   {"grw-poisson", grw},
      {"cross-integrator", cross_integrator},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2zu %-20s %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
