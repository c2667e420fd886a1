#include "topobohm/kernels.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

#include "topobohm/errors.hpp"

namespace topobohm {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// Planner calls are not thread-safe in FFTW; execution of an existing plan on
// new arrays is. Plans are made once per size and kept for the process.
const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(static_cast<size_t>(n));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p{fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags), fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags)};
  fftw_free(buf);
  if (!p.forward || !p.inverse) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

inline void fft_one(const PlanPair& p, cplx* row, bool inverse) {
  auto* f = reinterpret_cast<fftw_complex*>(row);
  fftw_execute_dft(inverse ? p.inverse : p.forward, f, f);
}

inline void eval_point(const cplx* coeffs, int n, int components, double theta, SpectralPoint& out) {
  // Sum over wavenumbers −n/2 … n/2 (n even) with the Nyquist coefficient
  // split evenly between ±n/2, so the interpolant of real data is real.
  const double inv_n = 1.0 / n;
  const cplx step = std::polar(1.0, theta);
  const int half = n / 2;
  for (int c = 0; c < components; ++c) {
    out.value[c] = 0.0;
    out.derivative[c] = 0.0;
  }
  // Complex products spelled out in reals: std::complex multiplication goes
  // through the NaN-recovering libgcc path, which dominates this loop.
  double er = std::cos(-half * theta), ei = std::sin(-half * theta);
  const double sr = step.real(), si = step.imag();
  double vr[kMaxComponents] = {}, vi[kMaxComponents] = {}, dr[kMaxComponents] = {}, di[kMaxComponents] = {};
  for (int k = -half; k <= half; ++k) {
    const int m = k < 0 ? k + n : k;
    const double w = (k == half || k == -half) ? 0.5 * inv_n : inv_n;
    for (int c = 0; c < components; ++c) {
      const cplx a = coeffs[static_cast<size_t>(c) * static_cast<size_t>(n) + static_cast<size_t>(m % n)];
      const double tr = (a.real() * er - a.imag() * ei) * w;
      const double ti = (a.real() * ei + a.imag() * er) * w;
      vr[c] += tr;
      vi[c] += ti;
      dr[c] -= k * ti;
      di[c] += k * tr;
    }
    const double nr = er * sr - ei * si;
    ei = er * si + ei * sr;
    er = nr;
  }
  for (int c = 0; c < components; ++c) {
    out.value[c] = cplx(vr[c], vi[c]);
    out.derivative[c] = cplx(dr[c], di[c]);
  }
}

void check_args(int n, int components) {
  if (components < 1 || components > kMaxComponents) throw DomainError("spectral_eval supports 1 to 4 components");
  if (n < 2 || n % 2 != 0) throw DomainError("spectral_eval needs an even number of grid points");
}

}  // namespace

namespace kernels::serial {

void multiply(std::span<cplx> data, std::span<const cplx> factor) {
  const auto n = data.size();
  for (size_t i = 0; i < n; ++i) data[i] *= factor[i];
}

void fft_rows(cplx* data, int n, int rows, bool inverse) {
  const auto& p = plans_for(n);
  for (int r = 0; r < rows; ++r) fft_one(p, data + static_cast<ptrdiff_t>(r) * n, inverse);
}

void spectral_eval(std::span<const cplx> coeffs, int n, int components, std::span<const double> points,
                   std::span<SpectralPoint> out) {
  check_args(n, components);
  for (size_t i = 0; i < points.size(); ++i) eval_point(coeffs.data(), n, components, points[i], out[i]);
}

}  // namespace kernels::serial

namespace kernels::omp {

void multiply(std::span<cplx> data, std::span<const cplx> factor) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[static_cast<size_t>(i)] *= factor[static_cast<size_t>(i)];
}

void fft_rows(cplx* data, int n, int rows, bool inverse) {
  const auto& p = plans_for(n);
#pragma omp parallel for schedule(static) if (rows > 8)
  for (int r = 0; r < rows; ++r) fft_one(p, data + static_cast<ptrdiff_t>(r) * n, inverse);
}

void spectral_eval(std::span<const cplx> coeffs, int n, int components, std::span<const double> points,
                   std::span<SpectralPoint> out) {
  check_args(n, components);
  const auto m = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (m > 16)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    eval_point(coeffs.data(), n, components, points[static_cast<size_t>(i)], out[static_cast<size_t>(i)]);
}

}  // namespace kernels::omp

void fft_rows(cplx* data, int n, int rows, bool inverse, Backend backend) {
  if (backend == Backend::omp)
    kernels::omp::fft_rows(data, n, rows, inverse);
  else
    kernels::serial::fft_rows(data, n, rows, inverse);
}

void fft_2d(cplx* data, int n, bool inverse, Backend backend) {
  fft_rows(data, n, n, inverse, backend);
  // Transpose, transform rows again, transpose back.
  auto transpose = [&] {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) std::swap(data[i * n + j], data[j * n + i]);
  };
  transpose();
  fft_rows(data, n, n, inverse, backend);
  transpose();
}

void multiply(std::span<cplx> data, std::span<const cplx> factor, Backend backend) {
  if (backend == Backend::omp)
    kernels::omp::multiply(data, factor);
  else
    kernels::serial::multiply(data, factor);
}

void spectral_eval(std::span<const cplx> coeffs, int n, int components, std::span<const double> points,
                   std::span<SpectralPoint> out, Backend backend) {
  if (backend == Backend::omp)
    kernels::omp::spectral_eval(coeffs, n, components, points, out);
  else
    kernels::serial::spectral_eval(coeffs, n, components, points, out);
}

}  // namespace topobohm
