#include <benchmark/benchmark.h>

#include <cmath>

#include "topobohm/bohm.hpp"
#include "topobohm/propagator.hpp"
#include "topobohm/states.hpp"

using namespace topobohm;

namespace {

Backend backend_arg(const benchmark::State& st) { return st.range(0) == 0 ? Backend::serial : Backend::omp; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) == 0 ? "serial" : "omp"); }

void BM_FftRows(benchmark::State& st) {
  const int n = static_cast<int>(st.range(1));
  std::vector<cplx> data(static_cast<size_t>(n) * n, cplx(1.0, 0.5));
  const Backend b = backend_arg(st);
  for (auto _ : st) {
    fft_rows(data.data(), n, n, false, b);
    fft_rows(data.data(), n, n, true, b);
    benchmark::DoNotOptimize(data.data());
  }
  label(st);
}
BENCHMARK(BM_FftRows)->ArgsProduct({{0, 1}, {64, 256}});

void BM_SpectralEval(benchmark::State& st) {
  const int n = 256;
  std::vector<cplx> coeffs(n, cplx(0.1, 0.2));
  std::vector<double> pts(static_cast<size_t>(st.range(1)));
  for (size_t i = 0; i < pts.size(); ++i) pts[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(pts.size());
  std::vector<SpectralPoint> out(pts.size());
  const Backend b = backend_arg(st);
  for (auto _ : st) {
    spectral_eval(coeffs, n, 1, pts, out, b);
    benchmark::DoNotOptimize(out.data());
  }
  label(st);
}
BENCHMARK(BM_SpectralEval)->ArgsProduct({{0, 1}, {1000, 10000}});

void BM_SplitStep(benchmark::State& st) {
  const int n = static_cast<int>(st.range(1));
  WaveGrid s = wrapped_gaussian(n, kPi, 0.5, 1.0, 0.7);
  const Propagator prop(s, Potential::from_scalar(sample_grid(n, [](double t) { return std::cos(t); })), 1e-3,
                        backend_arg(st));
  for (auto _ : st) prop.step(s);
  label(st);
}
BENCHMARK(BM_SplitStep)->ArgsProduct({{0, 1}, {256, 16384}});

void BM_Trajectories(benchmark::State& st) {
  const WaveGrid s = wrapped_gaussian(128, kPi, 0.5, 2.0, kPi);
  std::vector<double> q0(static_cast<size_t>(st.range(1)));
  for (size_t i = 0; i < q0.size(); ++i) q0[i] = 2.0 + 2.0 * static_cast<double>(i) / static_cast<double>(q0.size());
  TrajectoryOptions opt;
  opt.backend = backend_arg(st);
  opt.record_stride = 100;
  for (auto _ : st) benchmark::DoNotOptimize(integrate_trajectories(s, Potential::zero(128), q0, 1e-3, 0.1, opt));
  label(st);
}
BENCHMARK(BM_Trajectories)->ArgsProduct({{0, 1}, {1000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
