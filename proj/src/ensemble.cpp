#include "topobohm/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "topobohm/errors.hpp"

namespace topobohm {

GridDensity::GridDensity(std::vector<double> samples) : rho_(std::move(samples)) {
  if (rho_.size() < 2) throw DomainError("density needs at least two samples");
  h_ = kTwoPi / static_cast<double>(rho_.size());
  const size_t n = rho_.size();
  cum_.assign(n + 1, 0.0);
  for (size_t j = 0; j < n; ++j) {
    if (!(rho_[j] >= 0.0)) throw DomainError("density samples must be non-negative");
    cum_[j + 1] = cum_[j] + 0.5 * h_ * (rho_[j] + rho_[(j + 1) % n]);
  }
  const double total = cum_[n];
  if (!(total > 0.0)) throw DomainError("density vanishes everywhere");
  for (auto& r : rho_) r /= total;
  for (auto& c : cum_) c /= total;
}

GridDensity GridDensity::of(const WaveGrid& s) {
  std::vector<double> rho(static_cast<size_t>(s.n));
  for (int j = 0; j < s.n; ++j) rho[static_cast<size_t>(j)] = s.density(j);
  return GridDensity(std::move(rho));
}

double GridDensity::cdf(double theta) const {
  const size_t n = rho_.size();
  if (theta <= 0.0) return 0.0;
  if (theta >= kTwoPi) return 1.0;
  const auto j = std::min(n - 1, static_cast<size_t>(theta / h_));
  const double x = theta - static_cast<double>(j) * h_;
  const double a = rho_[j], b = rho_[(j + 1) % n];
  return cum_[j] + a * x + 0.5 * (b - a) * x * x / h_;
}

double GridDensity::quantile(double u) const {
  const size_t n = rho_.size();
  u = std::clamp(u, 0.0, 1.0);
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  size_t j = it == cum_.begin() ? 0 : static_cast<size_t>(it - cum_.begin()) - 1;
  j = std::min(j, n - 1);
  const double r = u - cum_[j];
  const double a = rho_[j], b = rho_[(j + 1) % n];
  const double s = (b - a) / h_;  // slope
  double x;
  if (std::abs(s) * h_ < 1e-14 * std::max(a, 1e-300)) {
    x = a > 0.0 ? r / a : 0.0;
  } else {
    // a x + s x²/2 = r; the root below avoids cancellation.
    const double disc = std::max(0.0, a * a + 2.0 * s * r);
    x = 2.0 * r / (a + std::sqrt(disc));
  }
  return std::clamp(static_cast<double>(j) * h_ + std::clamp(x, 0.0, h_), 0.0, std::nextafter(kTwoPi, 0.0));
}

std::vector<double> GridDensity::bin_masses(int bins) const {
  std::vector<double> out(static_cast<size_t>(bins));
  for (int b = 0; b < bins; ++b) out[static_cast<size_t>(b)] = mass(kTwoPi * b / bins, kTwoPi * (b + 1) / bins);
  return out;
}

std::vector<double> sample_density(const GridDensity& density, int n, Rng& rng) {
  if (n < 0) throw DomainError("sample count must be non-negative");
  std::vector<double> out(static_cast<size_t>(n));
  for (auto& x : out) x = density.quantile(uniform01(rng));
  return out;
}

std::vector<double> sample_density(const WaveGrid& state, int n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_density(GridDensity::of(state), n, rng);
}

namespace {

double reduce(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

}  // namespace

double total_variation(std::span<const double> angles, const GridDensity& density, int bins) {
  if (angles.empty()) throw DomainError("no samples");
  std::vector<double> counts(static_cast<size_t>(bins), 0.0);
  for (double a : angles) {
    const auto b = std::min(bins - 1, static_cast<int>(reduce(a) / kTwoPi * bins));
    counts[static_cast<size_t>(b)] += 1.0;
  }
  const auto p = density.bin_masses(bins);
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) tv += std::abs(counts[static_cast<size_t>(b)] / static_cast<double>(angles.size()) - p[static_cast<size_t>(b)]);
  return 0.5 * tv;
}

double ks_distance(std::span<const double> angles, const GridDensity& density) {
  if (angles.empty()) throw DomainError("no samples");
  std::vector<double> x(angles.size());
  std::transform(angles.begin(), angles.end(), x.begin(), reduce);
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double f = density.cdf(x[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / m - f), std::abs(f - static_cast<double>(i) / m)});
  }
  return d;
}

EnsembleReport verify_equivariance(const EquivarianceSetup& setup, int n, std::span<const double> checkpoints,
                                   std::uint64_t seed) {
  if (n < 1000) throw DomainError("equivariance check needs at least 1000 samples");
  if (checkpoints.empty()) throw DomainError("need at least one checkpoint");
  EnsembleReport rep;
  rep.n_samples = n;
  rep.seed = seed;
  rep.bins = setup.bins;
  const double t_end = *std::max_element(checkpoints.begin(), checkpoints.end());
  const auto q0 = sample_density(setup.initial, n, seed);

  // Record every step; checkpoints must fall on the step lattice.
  const auto trajs = integrate_trajectories(setup.initial, setup.potential, q0, setup.dt, t_end, setup.options);
  size_t halted = 0;
  for (const auto& t : trajs)
    if (t.status != TrajectoryStatus::completed) ++halted;
  rep.halted_fraction = static_cast<double>(halted) / n;
  rep.valid = rep.halted_fraction <= 0.01;

  std::vector<double> sorted(checkpoints.begin(), checkpoints.end());
  std::sort(sorted.begin(), sorted.end());
  WaveGrid state = setup.initial;
  const Propagator prop(setup.initial, setup.potential, setup.dt, setup.options.backend);
  long long done = 0;
  const int stride = std::max(1, setup.options.record_stride);
  rep.pass = rep.valid;
  for (double tc : sorted) {
    const long long k = std::llround(tc / setup.dt);
    if (std::abs(static_cast<double>(k) * setup.dt - tc) > 1e-9 * std::max(1.0, tc) || k % stride != 0)
      throw DomainError("checkpoint " + std::to_string(tc) + " is not on the recorded time lattice");
    prop.advance(state, k - done);
    done = k;
    const auto rec = static_cast<size_t>(k / stride);
    std::vector<double> pos;
    pos.reserve(trajs.size());
    for (const auto& t : trajs)
      if (t.status == TrajectoryStatus::completed) pos.push_back(t.coord(rec));
    const GridDensity rho = GridDensity::of(state);
    EquivarianceCheckpoint cp;
    cp.time = tc;
    cp.tv = total_variation(pos, rho, setup.bins);
    cp.ks = ks_distance(pos, rho);
    cp.threshold = 0.03 + 2.0 * std::sqrt(static_cast<double>(setup.bins) / n);
    cp.pass = cp.tv <= cp.threshold;
    rep.pass = rep.pass && cp.pass;
    rep.checkpoints.push_back(cp);
  }
  return rep;
}

EnsembleReport verify_equivariance(const EquivarianceSetup& setup, int n, double t_end, int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("need at least one checkpoint");
  std::vector<double> cps;
  for (int i = 1; i <= count; ++i) cps.push_back(t_end * i / count);
  return verify_equivariance(setup, n, cps, seed);
}

}  // namespace topobohm
