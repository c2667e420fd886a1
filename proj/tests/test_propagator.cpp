#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "topobohm/errors.hpp"
#include "topobohm/propagator.hpp"
#include "topobohm/reference.hpp"
#include "topobohm/states.hpp"

using namespace topobohm;

namespace {

double l2_diff(const std::vector<cplx>& a, const std::vector<cplx>& b, double h) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]) * h;
  return std::sqrt(s);
}

Potential cosine(int n, double amp, int components = 1) {
  return Potential::from_scalar(sample_grid(n, [amp](double t) { return amp * std::cos(t); }), components);
}

}  // namespace

TEST_CASE("kernels: FFT matches the naive DFT") {
  std::vector<cplx> x(16);
  for (size_t j = 0; j < x.size(); ++j) x[j] = cplx(std::sin(0.3 * double(j)), std::cos(1.7 * double(j * j)));
  const auto expect = oracle::dft(x);
  auto y = x;
  fft_rows(y.data(), 16, 1, false, Backend::serial);
  for (size_t m = 0; m < x.size(); ++m) CHECK(std::abs(y[m] - expect[m]) < 1e-12);
  fft_rows(y.data(), 16, 1, true, Backend::serial);
  for (size_t m = 0; m < x.size(); ++m) CHECK(std::abs(y[m] / 16.0 - x[m]) < 1e-14);
  CHECK(wavenumber(8, 16) == -8);
  CHECK(wavenumber(7, 16) == 7);
}

TEST_CASE("kernels: serial and OpenMP variants agree bitwise") {
  const int n = 64, rows = 40;
  std::vector<cplx> a(static_cast<size_t>(n * rows));
  for (size_t i = 0; i < a.size(); ++i) a[i] = cplx(std::sin(double(i)), std::cos(0.5 * double(i)));
  auto b = a;
  kernels::serial::fft_rows(a.data(), n, rows, false);
  kernels::omp::fft_rows(b.data(), n, rows, false);
  CHECK(a == b);

  std::vector<cplx> f(a.size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = std::polar(1.0, 0.01 * double(i));
  std::vector<cplx> big(8192, cplx(1.0, 2.0)), big2 = big, fb(8192, cplx(0.5, -0.5));
  kernels::serial::multiply(big, fb);
  kernels::omp::multiply(big2, fb);
  CHECK(big == big2);

  std::vector<double> pts(300);
  for (size_t i = 0; i < pts.size(); ++i) pts[i] = 0.021 * double(i);
  std::vector<SpectralPoint> p1(pts.size()), p2(pts.size());
  const std::vector<cplx> coeffs(a.begin(), a.begin() + 2 * n);
  kernels::serial::spectral_eval(coeffs, n, 2, pts, p1);
  kernels::omp::spectral_eval(coeffs, n, 2, pts, p2);
  for (size_t i = 0; i < pts.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      CHECK(p1[i].value[c] == p2[i].value[c]);
      CHECK(p1[i].derivative[c] == p2[i].derivative[c]);
    }
}

TEST_CASE("spectral interpolation reproduces a trigonometric polynomial") {
  const int n = 16;
  std::vector<cplx> x(n);
  for (int j = 0; j < n; ++j) x[static_cast<size_t>(j)] = std::cos(3.0 * kTwoPi * j / n) + cplx(0, 1) * std::sin(kTwoPi * j / n);
  fft_rows(x.data(), n, 1, false, Backend::serial);
  std::vector<double> pts{0.123, 2.5, 5.9};
  std::vector<SpectralPoint> out(pts.size());
  spectral_eval(x, n, 1, pts, out, Backend::serial);
  for (size_t i = 0; i < pts.size(); ++i) {
    const double t = pts[i];
    CHECK(std::abs(out[i].value[0] - (std::cos(3 * t) + cplx(0, 1) * std::sin(t))) < 1e-12);
    CHECK(std::abs(out[i].derivative[0] - (-3 * std::sin(3 * t) + cplx(0, 1) * std::cos(t))) < 1e-12);
  }
}

TEST_CASE("twist embedding round-trips cover-sheet data") {
  const int n = 32;
  const double beta = 1.1;
  std::vector<cplx> psi(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    psi[static_cast<size_t>(j)] = std::polar(1.0 + 0.3 * std::cos(t), (2 + beta / kTwoPi) * t);
  }
  const auto s = twist_embed(psi, ring_character(beta), EmbedInput::cover_sheet);
  const auto back = reconstruct_sheet(s, 0);
  const double scale = std::abs(back[5]) / std::abs(psi[5]);
  for (int j = 0; j < n; ++j) CHECK(std::abs(back[static_cast<size_t>(j)] - scale * psi[static_cast<size_t>(j)]) < 1e-12);
  const auto next = reconstruct_sheet(s, 1);
  CHECK(std::abs(next[3] - std::polar(1.0, beta) * back[3]) < 1e-12);
  CHECK(twist_residual(s) < 1e-12);
  CHECK(s.norm() == doctest::Approx(1.0));
}

TEST_CASE("eigenstates pick up the phase e^{-iEt}") {
  const double beta = 0.9;
  WaveGrid s = ring_eigenstate(64, 2, beta);
  const cplx c0 = s.at(0, 7);
  const Propagator prop(s, Potential::zero(64), 1e-3);
  prop.advance(s, 500);
  const double k = 2 + beta / kTwoPi;
  CHECK(std::abs(s.at(0, 7) - c0 * std::polar(1.0, -0.5 * k * k * 0.5)) < 1e-12);
}

TEST_CASE("free twisted evolution matches the exact Fourier solution") {
  const double beta = -2.0;
  WaveGrid s = wrapped_gaussian(128, 2.0, 0.4, 3.0, beta);
  const auto expect = oracle::free_evolve(s.chi, beta / kTwoPi, 0.7);
  const Propagator prop(s, Potential::zero(128), 0.007);
  prop.advance(s, 100);
  CHECK(l2_diff(s.chi, expect, s.dtheta()) < 1e-11);
}

TEST_CASE("Strang splitting converges at second order") {
  const WaveGrid s0 = von_mises(64, 1.0, 1.5, 1, 0.5);
  const Potential v = cosine(64, 2.0);
  WaveGrid ref = s0;
  Propagator(ref, v, 1e-4).advance(ref, 5000);
  double errs[2];
  for (int i = 0; i < 2; ++i) {
    WaveGrid s = s0;
    const double dt = i == 0 ? 0.02 : 0.01;
    Propagator(s, v, dt).advance(s, static_cast<long long>(std::lround(0.5 / dt)));
    errs[i] = l2_diff(s.chi, ref.chi, s.dtheta());
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("serial and OpenMP propagators agree bitwise") {
  WaveGrid a = wrapped_gaussian(256, 1.0, 0.3, 2.0, 0.4);
  WaveGrid b = a;
  const Potential v = cosine(256, 1.0);
  Propagator(a, v, 1e-3, Backend::serial).advance(a, 50);
  Propagator(b, v, 1e-3, Backend::omp).advance(b, 50);
  CHECK(a.chi == b.chi);
}

TEST_CASE("spectrum with a cosine potential matches the plane-wave oracle") {
  for (double beta : {0.0, 1.0, kPi}) {
    const auto ev = spectrum(128, scalar_rep(ring_character(beta), 1), cosine(128, 0.8), 6);
    const auto expect = oracle::mathieu_levels(beta / kTwoPi, 0.8, 6);
    for (int i = 0; i < 6; ++i) CHECK(ev[static_cast<size_t>(i)] == doctest::Approx(expect[static_cast<size_t>(i)]).epsilon(1e-10));
  }
  CHECK_THROWS(spectrum(16, MatrixRep(), Potential::zero(16), 5));
}

TEST_CASE("vector-potential gauge and twisted gauge are unitarily equivalent") {
  const double flux = 2.3, charge = 1.0;
  const auto plain = wrapped_gaussian(128, 2.0, 0.5, 1.0, 0.0);
  const auto a_state = with_vector_potential(plain, flux, charge);
  const auto tw = gauge_map(a_state, flux, charge);
  CHECK(tw.vector_potential == 0.0);
  CHECK(std::arg(tw.factor.generator_matrices().front()(0, 0)) == doctest::Approx(wrap_phase(-flux)));
  for (int j = 0; j < 128; ++j) CHECK(tw.density(j) == doctest::Approx(plain.density(j)));
  const auto back = gauge_map_inverse(tw, flux, charge);
  CHECK(l2_diff(back.chi, a_state.chi, back.dtheta()) < 1e-14);

  const Potential v = cosine(128, 0.5);
  const auto sa = spectrum_flux(128, flux, charge, v, 6);
  const auto st = spectrum(128, tw.factor, v, 6);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(sa[static_cast<size_t>(i)] - st[static_cast<size_t>(i)]) < 1e-10);
}

TEST_CASE("incompatible matrix potentials are refused") {
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 1.0);
  const auto s = twist_embed(std::vector<cplx>(32, 1.0), 2, ac);
  const auto sx = Potential::from_matrices(std::vector<CMatrix>(16, pauli::x()));
  CHECK_THROWS_AS(Propagator(s, sx, 1e-3), IncompatibleFactorError);
  const auto sz = Potential::from_matrices(std::vector<CMatrix>(16, pauli::z()));
  CHECK_NOTHROW(Propagator(s, sz, 1e-3));
  std::vector<CMatrix> nh(16, CMatrix::Identity(2, 2) * cplx(0, 1));
  CHECK_THROWS_AS(require_compatible(ac, Potential::from_matrices(nh), 16), DomainError);
}

TEST_CASE("matrix factor: sector spectrum of the Aharonov-Casher ring") {
  // Γ = e^{−iασz}: the two spin sectors see twists ∓α.
  const double alpha = 0.6;
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), alpha);
  const auto ev = spectrum(64, ac, Potential::zero(64, 2), 8);
  std::vector<double> expect;
  for (int m = -6; m <= 6; ++m)
    for (double b : {-alpha, alpha}) expect.push_back(0.5 * (m + b / kTwoPi) * (m + b / kTwoPi));
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 8; ++i) CHECK(ev[static_cast<size_t>(i)] == doctest::Approx(expect[static_cast<size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("two-particle torus: exchange symmetry and the diagonal node") {
  const int n = 32;
  const auto f = von_mises(n, 1.0, 1.0, 0, 0.3).chi;
  const auto g = von_mises(n, 3.0, 1.0, 1, 0.3).chi;
  TorusGrid t = torus_pair(n, -1, 0.3, f, g);
  CHECK(exchange_residual(t) < 1e-14);
  CHECK(diagonal_residual(t) < 1e-14);
  std::vector<double> v(static_cast<size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[static_cast<size_t>(i * n + j)] = std::cos(kTwoPi * (i - j) / n);
  const TorusPropagator tp(t, v, 1e-3);
  for (int i = 0; i < 200; ++i) tp.step(t);
  CHECK(exchange_residual(t) < 1e-12);
  CHECK(diagonal_residual(t) < 1e-12);
  CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<cplx> asym(static_cast<size_t>(n * n), 0.0);
  asym[1] = 1.0;
  CHECK_THROWS(make_torus_state(n, 1, 0.0, asym));
  v[1] = 5.0;
  CHECK_THROWS(TorusPropagator(t, v, 1e-3));
}

TEST_CASE("reference integrators") {
  const int n = 32;
  const auto d2 = CrankNicolson::second_derivative(n);
  Eigen::VectorXd f(n), expect(n);
  for (int j = 0; j < n; ++j) {
    f(j) = std::sin(2 * kTwoPi * j / n);
    expect(j) = -4 * f(j);
  }
  CHECK((d2 * f - expect).cwiseAbs().maxCoeff() < 1e-11);

  const auto v = sample_grid(64, [](double t) { return 0.5 * std::cos(t); });
  WaveGrid a = von_mises(64, kPi, 1.0, 0, 0.0), b = a;
  Propagator(a, Potential::from_scalar(v), 1e-3).advance(a, 200);
  CrankNicolson(64, v, 1e-3).advance(b, 200);
  CHECK(l2_diff(a.chi, b.chi, a.dtheta()) < 1e-6);
  WaveGrid twisted = ring_eigenstate(64, 0, 1.0);
  CHECK_THROWS(CrankNicolson(64, v, 1e-3).step(twisted));

  // A compatible factor keeps the sheets consistent in the ungauged picture.
  const auto ac = aharonov_casher_rep(Eigen::Vector3d(0, 0, 1), 1.0);
  std::vector<cplx> vals(128);
  for (int j = 0; j < 64; ++j) vals[static_cast<size_t>(j)] = vals[static_cast<size_t>(64 + j)] = std::exp(std::cos(kTwoPi * j / 64));
  CoverSheetIntegrator ok(twist_embed(vals, 2, ac), Potential::from_scalar(v, 2), 1e-3);
  for (int i = 0; i < 100; ++i) ok.step();
  CHECK(ok.twist_residual() < 1e-9);
  CHECK(ok.norm() == doctest::Approx(1.0).epsilon(1e-10));
}
