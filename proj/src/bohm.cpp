#include "topobohm/bohm.hpp"

#include <algorithm>
#include <cmath>

#include "topobohm/errors.hpp"

namespace topobohm {

namespace {

double reduce_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

long long step_count(double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw DomainError("need dt > 0 and T >= 0");
  const double r = t_end / dt;
  const long long n = std::llround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r)) throw DomainError("dt must divide the end time");
  return n;
}

}  // namespace

VelocityInterpolant::VelocityInterpolant(const WaveGrid& state, double eps_node, Backend backend)
    : n_(state.n), k_(state.components), backend_(backend), coeffs_(state.chi),
      vector_potential_(state.vector_potential) {
  const auto spec = state.sectors();
  Eigen::VectorXd d(k_);
  for (int c = 0; c < k_; ++c) d(c) = spec.phases[static_cast<size_t>(c)] / kTwoPi;
  generator_ = spec.basis * d.cast<cplx>().asDiagonal() * spec.basis.adjoint();
  fft_rows(coeffs_.data(), n_, k_, false, backend);
  max_density_ = 0.0;
  for (int j = 0; j < n_; ++j) max_density_ = std::max(max_density_, state.density(j));
  node_threshold_ = eps_node * max_density_;
}

void VelocityInterpolant::finish(const SpectralPoint& p, VelocitySample& out) const {
  double rho = 0.0, current = 0.0;
  for (int c = 0; c < k_; ++c) {
    rho += std::norm(p.value[c]);
    current += std::imag(std::conj(p.value[c]) * p.derivative[c]);
  }
  if (k_ == 1) {
    current += std::real(generator_(0, 0)) * rho;
  } else {
    for (int c = 0; c < k_; ++c)
      for (int d = 0; d < k_; ++d) current += std::real(std::conj(p.value[c]) * generator_(c, d) * p.value[d]);
  }
  out.density = rho;
  out.node = !(rho >= node_threshold_) || rho == 0.0;
  out.velocity = out.node ? 0.0 : current / rho - vector_potential_;
}

void VelocityInterpolant::evaluate(std::span<const double> theta, std::span<VelocitySample> out) const {
  std::vector<SpectralPoint> pts(theta.size());
  std::vector<double> reduced(theta.size());
  for (size_t i = 0; i < theta.size(); ++i) reduced[i] = reduce_angle(theta[i]);
  spectral_eval(coeffs_, n_, k_, reduced, pts, backend_);
  for (size_t i = 0; i < theta.size(); ++i) finish(pts[i], out[i]);
}

VelocitySample VelocityInterpolant::operator()(double theta) const {
  VelocitySample s;
  evaluate(std::span<const double>(&theta, 1), std::span<VelocitySample>(&s, 1));
  return s;
}

std::vector<VelocitySample> velocity_field(const WaveGrid& state, double eps_node) {
  const VelocityInterpolant interp(state, eps_node);
  std::vector<double> grid(static_cast<size_t>(state.n));
  for (int j = 0; j < state.n; ++j) grid[static_cast<size_t>(j)] = state.theta(j);
  std::vector<VelocitySample> out(grid.size());
  interp.evaluate(grid, out);
  return out;
}

SheetSamples cover_velocity(const WaveGrid& state, std::span<const long long> sheets) {
  const auto spec = state.sectors();
  Eigen::VectorXd d(state.components);
  for (int c = 0; c < state.components; ++c) d(c) = spec.phases[static_cast<size_t>(c)] / kTwoPi;
  const CMatrix kgen = spec.basis * d.cast<cplx>().asDiagonal() * spec.basis.adjoint();
  // ∂χ on the grid by spectral differentiation.
  std::vector<cplx> dchi = state.chi;
  fft_rows(dchi.data(), state.n, state.components, false, Backend::serial);
  for (int c = 0; c < state.components; ++c)
    for (int m = 0; m < state.n; ++m) {
      const int w = m == state.n / 2 ? 0 : wavenumber(m, state.n);
      dchi[static_cast<size_t>(c * state.n + m)] *= cplx(0.0, static_cast<double>(w) / state.n);
    }
  fft_rows(dchi.data(), state.n, state.components, true, Backend::serial);

  SheetSamples out;
  for (long long s : sheets) {
    out.sheets.push_back(s);
    std::vector<double> v(static_cast<size_t>(state.n));
    for (int j = 0; j < state.n; ++j) {
      const CMatrix g = fractional_power(spec, static_cast<double>(s) + state.theta(j) / kTwoPi);
      CVector dc(state.components);
      for (int c = 0; c < state.components; ++c) dc(c) = dchi[static_cast<size_t>(c * state.n + j)];
      const CVector chi = state.spinor(j);
      // ψ = Γ^t χ, ∂ψ = Γ^t (iKχ + ∂χ).
      const CVector psi = g * chi;
      const CVector dpsi = g * (cplx(0.0, 1.0) * (kgen * chi) + dc);
      const double rho = psi.squaredNorm();
      v[static_cast<size_t>(j)] = rho > 0.0 ? std::imag(psi.dot(dpsi)) / rho - state.vector_potential : 0.0;
    }
    out.values.push_back(std::move(v));
  }
  return out;
}

std::string to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::halted_at_node: return "halted-at-node";
    case TrajectoryStatus::left_resolution: return "left-resolution";
  }
  return "?";
}

double Trajectory::angle(std::size_t i, int d) const { return reduce_angle(coord(i, d)); }

long long Trajectory::winding(std::size_t i, int d) const {
  return static_cast<long long>(std::floor(coord(i, d) / kTwoPi)) -
         static_cast<long long>(std::floor(coord(0, d) / kTwoPi));
}

namespace {

/// Shared lockstep RK4 driver. `Field` evaluates velocities for a batch of
/// points (dims coordinates each) and flags nodes.
template <class State, class MakeField, class Step>
std::vector<Trajectory> lockstep(const State& initial, int dims, std::span<const double> starts, double dt,
                                 double t_end, const TrajectoryOptions& opt, MakeField make_field, Step step_full,
                                 Step step_half) {
  const long long steps = step_count(dt, t_end);
  const size_t count = starts.size() / static_cast<size_t>(dims);
  const auto D = static_cast<size_t>(dims);
  std::vector<Trajectory> out(count);
  std::vector<double> x(starts.begin(), starts.end());
  std::vector<char> active(count, 1);
  for (size_t i = 0; i < count; ++i) {
    out[i].dims = dims;
    out[i].times.push_back(0.0);
    out[i].coords.insert(out[i].coords.end(), x.begin() + static_cast<ptrdiff_t>(i * D),
                         x.begin() + static_cast<ptrdiff_t>((i + 1) * D));
  }
  const int stride = std::max(1, opt.record_stride);

  State state = initial;
  auto field0 = make_field(state);
  std::vector<double> pts, k1, k2, k3, k4;
  std::vector<char> node;
  std::vector<size_t> idx;
  for (long long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    State mid = state;
    step_half(mid);
    State next = state;
    step_full(next);
    auto field_mid = make_field(mid);
    auto field1 = make_field(next);

    idx.clear();
    for (size_t i = 0; i < count; ++i)
      if (active[i]) idx.push_back(i);
    const size_t m = idx.size();
    pts.resize(m * D);
    std::vector<char> halted(m, 0);
    auto stage = [&](const auto& field, const std::vector<double>* prev, double h, std::vector<double>& k) {
      for (size_t a = 0; a < m; ++a)
        for (size_t d = 0; d < D; ++d)
          pts[a * D + d] = x[idx[a] * D + d] + (prev ? h * (*prev)[a * D + d] : 0.0);
      k.resize(m * D);
      node.assign(m, 0);
      field.evaluate(pts, k, node);
      for (size_t a = 0; a < m; ++a) {
        if (node[a]) halted[a] = 1;
        for (size_t d = 0; d < D; ++d) k[a * D + d] *= opt.velocity_scale;
      }
    };
    stage(field0, nullptr, 0.0, k1);
    stage(field_mid, &k1, 0.5 * dt, k2);
    stage(field_mid, &k2, 0.5 * dt, k3);
    stage(field1, &k3, dt, k4);

    const double t_next = static_cast<double>(s + 1) * dt;
    const bool record = (s + 1) % stride == 0 || s + 1 == steps;
    for (size_t a = 0; a < m; ++a) {
      const size_t i = idx[a];
      if (halted[a]) {
        active[i] = 0;
        out[i].status = TrajectoryStatus::halted_at_node;
        out[i].status_time = t;
        continue;
      }
      bool ok = true;
      for (size_t d = 0; d < D; ++d) {
        const double dx = dt / 6.0 * (k1[a * D + d] + 2.0 * k2[a * D + d] + 2.0 * k3[a * D + d] + k4[a * D + d]);
        if (!std::isfinite(dx) || std::abs(dx) > 0.5 * kPi) ok = false;
      }
      if (!ok) {
        active[i] = 0;
        out[i].status = TrajectoryStatus::left_resolution;
        out[i].status_time = t;
        continue;
      }
      for (size_t d = 0; d < D; ++d)
        x[i * D + d] += dt / 6.0 * (k1[a * D + d] + 2.0 * k2[a * D + d] + 2.0 * k3[a * D + d] + k4[a * D + d]);
      if (record) {
        out[i].times.push_back(t_next);
        out[i].coords.insert(out[i].coords.end(), x.begin() + static_cast<ptrdiff_t>(i * D),
                             x.begin() + static_cast<ptrdiff_t>((i + 1) * D));
      }
    }
    state = std::move(next);
    field0 = std::move(field1);
  }
  for (size_t i = 0; i < count; ++i)
    if (active[i]) out[i].status_time = static_cast<double>(steps) * dt;
  return out;
}

struct RingField {
  VelocityInterpolant interp;
  void evaluate(const std::vector<double>& pts, std::vector<double>& v, std::vector<char>& node) const {
    std::vector<VelocitySample> s(pts.size());
    interp.evaluate(pts, s);
    for (size_t i = 0; i < pts.size(); ++i) {
      v[i] = s[i].velocity;
      node[i] = s[i].node;
    }
  }
};

/// 2-D trigonometric interpolant of a torus state.
class TorusField {
 public:
  TorusField(const TorusGrid& s, double eps, Backend backend) : n_(s.n), shift_(s.beta / kTwoPi), backend_(backend), c_(s.chi) {
    fft_2d(c_.data(), n_, false, backend);
    double mx = 0.0;
    for (const auto& z : s.chi) mx = std::max(mx, std::norm(z));
    threshold_ = eps * mx;
  }

  void evaluate(const std::vector<double>& pts, std::vector<double>& v, std::vector<char>& node) const {
    const auto m = static_cast<std::ptrdiff_t>(pts.size() / 2);
    const bool par = backend_ == Backend::omp;
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t i = 0; i < m; ++i) point(pts[2 * static_cast<size_t>(i)], pts[2 * static_cast<size_t>(i) + 1],
                                                &v[2 * static_cast<size_t>(i)], node[static_cast<size_t>(i)]);
  }

 private:
  void point(double t1, double t2, double* v, char& node) const {
    const int half = n_ / 2;
    const size_t len = static_cast<size_t>(n_) + 1;
    std::vector<cplx> e1(len), e2(len);
    std::vector<int> idx(len), kk(len);
    const cplx s1 = std::polar(1.0, t1), s2 = std::polar(1.0, t2);
    cplx a1 = std::polar(1.0, -half * t1), a2 = std::polar(1.0, -half * t2);
    for (size_t a = 0; a < len; ++a, a1 *= s1, a2 *= s2) {
      const int k = static_cast<int>(a) - half;
      const double w = (k == half || k == -half) ? 0.5 : 1.0;
      e1[a] = w * a1;
      e2[a] = w * a2;
      kk[a] = k;
      idx[a] = (k + n_) % n_;
    }
    cplx val = 0.0, d1 = 0.0, d2 = 0.0;
    for (size_t a = 0; a < len; ++a) {
      cplx row = 0.0, drow = 0.0;
      const cplx* cr = &c_[static_cast<size_t>(idx[a]) * static_cast<size_t>(n_)];
      for (size_t b = 0; b < len; ++b) {
        const cplx t = cr[idx[b]] * e2[b];
        row += t;
        drow += cplx(0.0, kk[b]) * t;
      }
      val += e1[a] * row;
      d1 += cplx(0.0, kk[a]) * e1[a] * row;
      d2 += e1[a] * drow;
    }
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    val *= scale;
    d1 *= scale;
    d2 *= scale;
    const double rho = std::norm(val);
    node = !(rho >= threshold_) || rho == 0.0;
    v[0] = node ? 0.0 : std::imag(std::conj(val) * d1) / rho + shift_;
    v[1] = node ? 0.0 : std::imag(std::conj(val) * d2) / rho + shift_;
  }

  int n_;
  double shift_;
  Backend backend_;
  std::vector<cplx> c_;
  double threshold_;
};

}  // namespace

std::vector<Trajectory> integrate_trajectories(const WaveGrid& initial, const Potential& v, std::span<const double> q0,
                                               double dt, double t_end, const TrajectoryOptions& opt) {
  const Propagator full(initial, v, dt, opt.backend);
  const Propagator half(initial, v, 0.5 * dt, opt.backend);
  return lockstep(
      initial, 1, q0, dt, t_end, opt,
      [&](const WaveGrid& s) { return RingField{VelocityInterpolant(s, opt.eps_node, opt.backend)}; },
      std::function<void(WaveGrid&)>([&](WaveGrid& s) { full.step(s); }),
      std::function<void(WaveGrid&)>([&](WaveGrid& s) { half.step(s); }));
}

Trajectory integrate_trajectory(const WaveGrid& initial, const Potential& v, double q0, double dt, double t_end,
                                const TrajectoryOptions& options) {
  return integrate_trajectories(initial, v, std::span<const double>(&q0, 1), dt, t_end, options).front();
}

std::vector<Trajectory> integrate_torus_trajectories(const TorusGrid& initial, const std::vector<double>& v,
                                                     std::span<const std::array<double, 2>> q0, double dt,
                                                     double t_end, const TrajectoryOptions& opt) {
  const TorusPropagator full(initial, v, dt, opt.backend);
  const TorusPropagator half(initial, v, 0.5 * dt, opt.backend);
  std::vector<double> starts;
  for (const auto& p : q0) starts.insert(starts.end(), p.begin(), p.end());
  return lockstep(
      initial, 2, starts, dt, t_end, opt, [&](const TorusGrid& s) { return TorusField(s, opt.eps_node, opt.backend); },
      std::function<void(TorusGrid&)>([&](TorusGrid& s) { full.step(s); }),
      std::function<void(TorusGrid&)>([&](TorusGrid& s) { half.step(s); }));
}

std::vector<RingPoint> lift_trajectory(const Trajectory& traj, const RingPoint& q0_hat) {
  if (traj.dims != 1 || traj.size() == 0) throw DomainError("lift_trajectory expects a non-empty ring trajectory");
  const double start = traj.angle(0);
  if (std::abs(wrap_phase(q0_hat.angle - start)) > 1e-12) throw DomainError("lift start does not project to the trajectory start");
  std::vector<RingPoint> out;
  out.reserve(traj.size());
  const double base = q0_hat.unwrapped();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i > 0 && std::abs(traj.coord(i) - traj.coord(i - 1)) > kPi)
      throw DomainError("trajectory jumps by more than pi between samples; no continuous lift");
    out.push_back(RingPoint::from_unwrapped(base + (traj.coord(i) - traj.coord(0))));
  }
  return out;
}

}  // namespace topobohm
