#include "topobohm/grw.hpp"

#include <cmath>

#include "topobohm/ensemble.hpp"
#include "topobohm/errors.hpp"

namespace topobohm {

namespace {

void check_width(double a) {
  if (!(a > 0.0)) throw DomainError("collapse width a must be positive");
}

std::vector<double> profile_row(int n, double x, double a) {
  std::vector<double> f(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) f[static_cast<size_t>(j)] = collapse_profile(x, kTwoPi * j / n, a);
  return f;
}

}  // namespace

double collapse_profile(double x, double theta, double a) {
  check_width(a);
  if (std::isinf(a)) return 1.0;
  const double d = wrap_phase(theta - x);
  return std::exp(-d * d / (2.0 * a * a));
}

double collapse_rate(const WaveGrid& s, double x, double lambda, double a) {
  const auto f = profile_row(s.n, x, a);
  double r = 0.0;
  for (int j = 0; j < s.n; ++j) r += f[static_cast<size_t>(j)] * s.density(j);
  return lambda * r * s.dtheta();
}

double collapse_rate(const TorusGrid& s, double x, double lambda, double a) {
  const auto f = profile_row(s.n, x, a);
  double r = 0.0;
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) r += (f[static_cast<size_t>(i)] + f[static_cast<size_t>(j)]) * std::norm(s.at(i, j));
  return lambda * r * s.dtheta() * s.dtheta();
}

std::vector<double> collapse_rates(const WaveGrid& s, double lambda, double a) {
  std::vector<double> r(static_cast<size_t>(s.n));
  for (int j = 0; j < s.n; ++j) r[static_cast<size_t>(j)] = collapse_rate(s, s.theta(j), lambda, a);
  return r;
}

std::vector<double> collapse_rates(const TorusGrid& s, double lambda, double a) {
  // Marginal densities make the two-particle rate a sum of one-particle rates.
  std::vector<double> m(static_cast<size_t>(s.n), 0.0);
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) {
      const double p = std::norm(s.at(i, j)) * s.dtheta();
      m[static_cast<size_t>(i)] += p;
      m[static_cast<size_t>(j)] += p;
    }
  std::vector<double> r(static_cast<size_t>(s.n));
  for (int k = 0; k < s.n; ++k) {
    const auto f = profile_row(s.n, kTwoPi * k / s.n, a);
    double acc = 0.0;
    for (int j = 0; j < s.n; ++j) acc += f[static_cast<size_t>(j)] * m[static_cast<size_t>(j)];
    r[static_cast<size_t>(k)] = lambda * acc * s.dtheta();
  }
  return r;
}

void apply_sqrt_profile(WaveGrid& s, double x, double a) {
  const auto f = profile_row(s.n, x, a);
  for (int c = 0; c < s.components; ++c)
    for (int j = 0; j < s.n; ++j) s.at(c, j) *= std::sqrt(f[static_cast<size_t>(j)]);
}

void apply_sqrt_profile(TorusGrid& s, double x, double a) {
  const auto f = profile_row(s.n, x, a);
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) s.at(i, j) *= std::sqrt(f[static_cast<size_t>(i)] + f[static_cast<size_t>(j)]);
}

namespace {

template <class State>
State collapse_impl(const State& state, double x, double lambda, double a) {
  if (!(lambda > 0.0)) throw DomainError("collapse needs lambda > 0");
  State out = state;
  apply_sqrt_profile(out, x, a);
  const double nrm = out.norm();
  if (!(nrm > 0.0)) throw DomainError("collapse rate vanishes at x = " + std::to_string(x));
  for (auto& z : out.chi) z /= nrm;
  return out;
}

}  // namespace

WaveGrid apply_collapse(const WaveGrid& s, double x, double lambda, double a) { return collapse_impl(s, x, lambda, a); }
TorusGrid apply_collapse(const TorusGrid& s, double x, double lambda, double a) { return collapse_impl(s, x, lambda, a); }

GrwRun simulate_grw(const WaveGrid& initial, const Potential& v, double dt, double t_end, const GrwParams& p,
                    std::uint64_t seed, Backend backend) {
  check_width(p.a);
  if (p.lambda < 0.0) throw DomainError("lambda must be non-negative");
  if (!(dt > 0.0) || t_end < 0.0) throw DomainError("need dt > 0 and T >= 0");
  Rng rng(seed);
  GrwRun run{{}, initial, {}, 0};
  WaveGrid& state = run.final_state;
  const Propagator prop(initial, v, dt, backend);

  // Rate bound: λ times the largest grid quadrature of the profile, which
  // bounds ∫ r(x) dx for any normalized state.
  auto bound_for = [&](const WaveGrid& s) {
    if (p.lambda == 0.0) return 0.0;
    double best = 0.0;
    for (int j = 0; j < s.n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < s.n; ++l) acc += collapse_profile(s.theta(l), s.theta(j), p.a);
      best = std::max(best, acc * s.dtheta());
    }
    return p.lambda * best * s.norm() * s.norm() * (1.0 + 1e-9);
  };
  auto total_rate = [&](const WaveGrid& s) {
    double r = 0.0;
    for (double x : collapse_rates(s, p.lambda, p.a)) r += x;
    return r * s.dtheta();
  };

  double bound = bound_for(state);
  double t = 0.0;
  long long steps = 0;
  auto draw_next = [&](double from) {
    return bound > 0.0 ? from + exponential(rng, bound) : std::numeric_limits<double>::infinity();
  };
  double candidate = draw_next(0.0);
  while (t < t_end) {
    const double step_end = std::min(t + dt, t_end);
    if (candidate < step_end) {
      // Bring the state to the candidate time with a partial step.
      if (candidate > t) {
        Propagator(state, v, candidate - t, backend).step(state);
        t = candidate;
      }
      ++run.candidates;
      const double rate = total_rate(state);
      if (rate > bound) {
        run.log.push_back("t=" + std::to_string(t) + ": stale bound " + std::to_string(bound) + " < rate " +
                          std::to_string(rate) + ", refreshed and retried");
        bound = std::max(bound_for(state), rate * (1.0 + 1e-9));
        candidate = draw_next(t);
        continue;
      }
      if (uniform01(rng) * bound < rate) {
        const auto rates = collapse_rates(state, p.lambda, p.a);
        const GridDensity centre(rates);
        const double x = centre.quantile(uniform01(rng));
        CollapseEvent ev;
        ev.time = t;
        ev.x = x;
        ev.pre_norm = state.norm();
        WaveGrid raw = state;
        apply_sqrt_profile(raw, x, p.a);
        ev.collapsed_norm = raw.norm();
        state = apply_collapse(state, x, p.lambda, p.a);
        ev.post_norm = state.norm();
        ev.twist_residual = twist_residual(state);
        if (!p.allow_aperiodic && ev.twist_residual > 1e-9)
          throw ToleranceBreach("grw.twist_residual", ev.twist_residual, 1e-9);
        run.events.push_back(ev);
      }
      candidate = draw_next(t);
      continue;
    }
    if (step_end - t < dt * (1.0 - 1e-12))
      Propagator(state, v, step_end - t, backend).step(state);
    else
      prop.step(state);
    t = step_end;
    if (++steps % 100 == 0) {
      bound = bound_for(state);
      candidate = draw_next(t);
    }
  }
  return run;
}

}  // namespace topobohm
