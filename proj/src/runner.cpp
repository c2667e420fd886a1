#include "topobohm/runner.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "topobohm/bohm.hpp"
#include "topobohm/ensemble.hpp"
#include "topobohm/errors.hpp"
#include "topobohm/grw.hpp"
#include "topobohm/hash.hpp"
#include "topobohm/io.hpp"
#include "topobohm/scenario.hpp"
#include "topobohm/schema.hpp"
#include "topobohm/states.hpp"

namespace topobohm {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> c{"evolve",   "spectrum",      "trajectories", "equivariance",
                                          "ab-compare", "classify", "twisted-check", "grw"};
  return c;
}

namespace {

/// Collects invariant checks and written files for the manifest.
class RunContext {
 public:
  RunContext(json cfg, fs::path out) : cfg_(std::move(cfg)), out_(std::move(out)) {}

  const json& cfg() const { return cfg_; }

  void invariant(const std::string& id, double residual, double tolerance) {
    const bool pass = residual <= tolerance;
    invariants_.push_back({{"id", id}, {"residual", residual}, {"tolerance", tolerance}, {"pass", pass}});
    if (!pass && !first_failure_) first_failure_ = ToleranceBreach(id, residual, tolerance);
  }

  /// Like invariant() but for lower bounds (negative controls).
  void invariant_above(const std::string& id, double value, double bound) {
    const bool pass = value > bound;
    invariants_.push_back({{"id", id}, {"residual", value}, {"tolerance", bound}, {"pass", pass}});
    if (!pass && !first_failure_) first_failure_ = ToleranceBreach(id, value, bound);
  }

  void write(const std::string& name, const std::string& content) {
    const auto f = write_atomic(out_, name, content);
    files_.push_back({{"name", f.name}, {"bytes", f.bytes}, {"digest", f.digest}});
  }
  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  /// Throws the first recorded breach, after all outputs are written.
  void finish() const {
    if (first_failure_) throw *first_failure_;
  }

  json invariants_json() const { return invariants_; }
  json files_json() const { return files_; }

 private:
  json cfg_;
  fs::path out_;
  json invariants_ = json::array();
  json files_ = json::array();
  std::optional<ToleranceBreach> first_failure_;
};

double tol(const json& cfg, const char* key) { return cfg["numerics"]["tolerances"][key]; }

void require_ring(const json& cfg, const std::string& command) {
  if (is_two_particle(cfg)) throw SchemaError("/space/kind", command + " runs on the single-particle ring");
}

double norm_drift(double norm) { return std::abs(norm * norm - 1.0); }

// ------------------------------------------------------------------ evolve

void cmd_evolve(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  const long long steps = build_steps(cfg);
  const int every = cfg["numerics"]["check_every"];
  const double dt = cfg["numerics"]["dt"];
  if (is_two_particle(cfg)) {
    TorusGrid s = build_torus_state(cfg);
    const TorusPropagator prop(s, build_torus_potential(cfg), dt);
    double drift = 0.0, exch = 0.0, diag = 0.0;
    for (long long i = 1; i <= steps; ++i) {
      prop.step(s);
      if (i % every == 0 || i == steps) {
        drift = std::max(drift, norm_drift(s.norm()));
        exch = std::max(exch, exchange_residual(s));
        if (s.sector < 0) diag = std::max(diag, diagonal_residual(s));
      }
    }
    ctx.invariant("norm_drift", drift, tol(cfg, "norm"));
    ctx.invariant("exchange_residual", exch, tol(cfg, "exchange"));
    if (s.sector < 0) ctx.invariant("diagonal_node", diag, tol(cfg, "exchange"));
    if (cfg["outputs"]["state"]) ctx.write_json("state.json", state_to_json(s));
    return;
  }
  WaveGrid s = build_state(cfg);
  const Propagator prop(s, build_potential(cfg, s.components), dt);
  double drift = 0.0, twist = twist_residual(s);
  for (long long i = 1; i <= steps; ++i) {
    prop.step(s);
    if (i % every == 0 || i == steps) {
      drift = std::max(drift, norm_drift(s.norm()));
      twist = std::max(twist, twist_residual(s));
    }
  }
  ctx.invariant("norm_drift", drift, tol(cfg, "norm"));
  ctx.invariant("twist_residual", twist, tol(cfg, "twist"));
  if (cfg["outputs"]["state"]) ctx.write_json("state.json", state_to_json(s));
}

// ---------------------------------------------------------------- spectrum

std::vector<double> analytic_levels(const MatrixRep& factor, double ea, int count) {
  const auto spec = unitary_spectrum(factor.generator_matrices().front());
  std::vector<double> e;
  for (double phase : spec.phases)
    for (int m = -count - 2; m <= count + 2; ++m) {
      const double k = m + phase / kTwoPi - ea;
      e.push_back(0.5 * k * k);
    }
  std::sort(e.begin(), e.end());
  e.resize(static_cast<size_t>(count));
  return e;
}

void cmd_spectrum(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  require_ring(cfg, "spectrum");
  const int n = grid_points(cfg);
  const int levels = cfg["numerics"]["n_levels"];
  const MatrixRep factor = build_factor(cfg);
  const double ea = build_vector_potential(cfg);
  const Potential v = build_potential(cfg, factor.dimension());
  if (levels > n * factor.dimension() / 4) throw SchemaError("/numerics/n_levels", "must not exceed n_points*components/4");
  const auto ev = ea != 0.0 || cfg["factor"]["kind"] == "flux"
                      ? spectrum_flux(n, ea * kTwoPi, 1.0, v, levels)
                      : spectrum(n, factor, v, levels);
  std::vector<double> exact;
  if (cfg["potential"]["kind"] == "zero") {
    exact = analytic_levels(factor, ea, levels);
    double worst = 0.0;
    for (int i = 0; i < levels; ++i)
      worst = std::max(worst, std::abs(ev[static_cast<size_t>(i)] - exact[static_cast<size_t>(i)]) /
                                  std::max(1.0, std::abs(exact[static_cast<size_t>(i)])));
    ctx.invariant("spectrum_analytic", worst, 1e-8);
  }
  ctx.write("spectrum.csv", spectrum_csv(ev, exact));
}

// ------------------------------------------------------------ trajectories

std::vector<double> quantile_starts(const WaveGrid& s, int count) {
  const GridDensity rho = GridDensity::of(s);
  std::vector<double> q(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) q[static_cast<size_t>(i)] = rho.quantile((i + 0.5) / count);
  return q;
}

TrajectoryOptions trajectory_options(const json& cfg, double scale) {
  TrajectoryOptions o;
  o.eps_node = cfg["numerics"]["eps_node"];
  o.record_stride = cfg["numerics"]["record_stride"];
  o.velocity_scale = scale;
  return o;
}

void cmd_trajectories(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  const double dt = cfg["numerics"]["dt"];
  const double t_end = cfg["numerics"]["T"];
  build_steps(cfg);
  const auto& tj = cfg["trajectories"];
  const auto opt = trajectory_options(cfg, tj["velocity_scale"]);
  if (is_two_particle(cfg)) {
    const TorusGrid s = build_torus_state(cfg);
    if (!tj.contains("starts") || tj["starts"].size() % 2 != 0)
      throw SchemaError("/trajectories/starts", "two-particle runs need starts as flat (theta1, theta2) pairs");
    std::vector<std::array<double, 2>> q0;
    for (size_t i = 0; i < tj["starts"].size(); i += 2) q0.push_back({tj["starts"][i].get<double>(), tj["starts"][i + 1].get<double>()});
    const auto trajs = integrate_torus_trajectories(s, build_torus_potential(cfg), q0, dt, t_end, opt);
    if (s.sector < 0) {
      double gap = kPi;
      for (const auto& t : trajs)
        for (size_t i = 0; i < t.size(); ++i) gap = std::min(gap, std::abs(wrap_phase(t.coord(i, 0) - t.coord(i, 1))));
      ctx.invariant_above("diagonal_gap", gap, 0.0);
    }
    ctx.write("trajectories.csv", trajectories_csv(trajs));
    return;
  }
  const WaveGrid s = build_state(cfg);
  std::vector<double> q0;
  if (tj.contains("starts")) {
    q0 = tj["starts"].get<std::vector<double>>();
  } else {
    Rng rng(require_seed(cfg));
    q0 = sample_density(GridDensity::of(s), tj["count"], rng);
  }
  const std::vector<long long> sheets{-1, 0, 1};
  ctx.invariant("projectability", projectability_residual(cover_velocity(s, sheets)), tol(cfg, "twist"));
  const auto trajs = integrate_trajectories(s, build_potential(cfg, s.components), q0, dt, t_end, opt);
  ctx.write("trajectories.csv", trajectories_csv(trajs));
}

// ------------------------------------------------------------ equivariance

void cmd_equivariance(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  require_ring(cfg, "equivariance");
  const auto seed = require_seed(cfg);
  const auto& eq = cfg["equivariance"];
  EquivarianceSetup setup{build_state(cfg), {}, cfg["numerics"]["dt"], trajectory_options(cfg, eq["velocity_scale"]), eq["bins"]};
  setup.potential = build_potential(cfg, setup.initial.components);
  setup.options.record_stride = 1;
  const auto cps = eq["checkpoints"].get<std::vector<double>>();
  const auto rep = verify_equivariance(setup, eq["samples"], cps, seed);
  json doc = {{"n_samples", rep.n_samples}, {"seed", rep.seed},         {"bins", rep.bins},
              {"halted_fraction", rep.halted_fraction}, {"valid", rep.valid}, {"pass", rep.pass}};
  doc["checkpoints"] = json::array();
  for (const auto& c : rep.checkpoints) {
    doc["checkpoints"].push_back({{"t", c.time}, {"tv", c.tv}, {"ks", c.ks}, {"threshold", c.threshold}, {"pass", c.pass}});
    ctx.invariant("equivariance_tv_t" + format_number(c.time), c.tv, c.threshold);
  }
  ctx.invariant("halted_fraction", rep.halted_fraction, 0.01);
  ctx.write_json("equivariance.json", doc);
}

// -------------------------------------------------------------- ab-compare

void cmd_ab_compare(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  require_ring(cfg, "ab-compare");
  const auto& f = cfg["factor"];
  if (f["kind"] != "flux") throw SchemaError("/factor/kind", "ab-compare needs the flux factor (use --flux)");
  const double flux = f.value("flux", 0.0);
  const double charge = f.value("charge", cfg["units"].value("charge", 1.0));
  const int n = grid_points(cfg);
  const double dt = cfg["numerics"]["dt"];
  const double t_end = cfg["numerics"]["T"];
  build_steps(cfg);
  const WaveGrid a_state = build_state(cfg);
  const WaveGrid twisted = gauge_map(a_state, flux, charge);
  const Potential v = build_potential(cfg, 1);
  if (v.is_matrix()) throw SchemaError("/potential/kind", "ab-compare uses scalar potentials");

  const auto& tj = cfg["trajectories"];
  const auto q0 = tj.contains("starts") ? tj["starts"].get<std::vector<double>>() : quantile_starts(a_state, tj["count"]);
  const auto opt = trajectory_options(cfg, 1.0);
  const auto ta = integrate_trajectories(a_state, v, q0, dt, t_end, opt);
  const auto tt = integrate_trajectories(twisted, v, q0, dt, t_end, opt);
  double dev = 0.0;
  for (size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].size() != tt[i].size()) dev = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < std::min(ta[i].size(), tt[i].size()); ++s) dev = std::max(dev, std::abs(ta[i].coord(s) - tt[i].coord(s)));
  }
  const int levels = std::min(cfg["numerics"]["n_levels"].get<int>(), n / 4);
  const auto sa = spectrum_flux(n, flux, charge, v, levels);
  const auto st = spectrum(n, twisted.factor, v, levels);
  const auto sp = spectrum_flux(n, flux + kTwoPi / charge, charge, v, levels);
  double dspec = 0.0, dper = 0.0;
  for (int i = 0; i < levels; ++i) {
    dspec = std::max(dspec, std::abs(sa[static_cast<size_t>(i)] - st[static_cast<size_t>(i)]));
    dper = std::max(dper, std::abs(sa[static_cast<size_t>(i)] - sp[static_cast<size_t>(i)]));
  }
  ctx.invariant("trajectory_deviation", dev, tol(cfg, "gauge"));
  ctx.invariant("spectrum_gauge", dspec, tol(cfg, "spectrum"));
  ctx.invariant("spectrum_flux_period", dper, tol(cfg, "spectrum"));
  json doc = {{"flux", flux},
              {"charge", charge},
              {"gamma", complex_to_json(twisted.factor.generator_matrices().front()(0, 0))},
              {"trajectories", q0.size()},
              {"max_trajectory_deviation", dev},
              {"max_spectrum_difference", dspec},
              {"max_flux_period_difference", dper},
              {"spectrum_vector_potential", sa},
              {"spectrum_twisted", st}};
  ctx.write_json("ab_compare.json", doc);
}

// ---------------------------------------------------------------- classify

void cmd_classify(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  require_ring(cfg, "classify");
  const MatrixRep factor = build_factor(cfg);
  const int k = factor.dimension();
  std::vector<CMatrix> samples;
  if (cfg["potential"]["kind"] == "random_hermitian") {
    samples = random_hermitian_samples(cfg["potential"]["samples"], k, require_seed(cfg));
  } else {
    const Potential v = build_potential(cfg, k);
    // Distinct samples only; a constant potential contributes one matrix.
    for (int j = 0; j < v.size(); ++j) {
      CMatrix m = v.sample(j);
      if (std::none_of(samples.begin(), samples.end(), [&](const CMatrix& o) { return max_abs(o - m) == 0.0; }))
        samples.push_back(std::move(m));
    }
  }
  const auto c = classify_dynamics(factor, samples, cfg["classify"]["word_length_cap"]);
  json doc = {{"label", to_string(c.label)},
              {"compatible", c.compatible},
              {"verdict", c.verdict},
              {"commutator_residual", c.commutator_residual},
              {"algebra_dimension", c.algebra_dimension},
              {"full_dimension", c.full_dimension},
              {"algebra_spans_full", c.algebra_spans_full},
              {"potential_samples", samples.size()}};
  ctx.write_json("classification.json", doc);
}

// ----------------------------------------------------------- twisted-check

void cmd_twisted_check(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  const auto seed = require_seed(cfg);
  const auto& tw = cfg["twisted"];
  std::vector<CMatrix> gens;
  if (tw.contains("generators")) {
    for (size_t i = 0; i < tw["generators"].size(); ++i) {
      try {
        gens.push_back(matrix_from_json(tw["generators"][i]));
      } catch (const DomainError& e) {
        throw SchemaError("/twisted/generators/" + std::to_string(i), e.what());
      }
    }
  } else {
    gens.push_back(spin_rotation(Eigen::Vector3d(0, 0, 1), kPi / 2));
  }
  std::vector<int> labels;
  if (tw.contains("labels")) labels = tw["labels"].get<std::vector<int>>();
  auto table = TwistedRepTable::nfermion(tw["particles"], gens, tw["radius"], labels);
  if (tw["corrupt"]) {
    const auto& pool = table.sample_pool();
    const DeckElement& victim = pool.size() > 1 ? pool[1] : pool.front();
    auto e = table.at(victim);
    e.factor *= -1.0;
    table.set(victim, e);
  }
  const double r = verify_twisted_law(table, tw["samples"], seed);
  if (tw["corrupt"])
    ctx.invariant_above("twisted_law_corruption_detected", r, 0.1);
  else
    ctx.invariant("twisted_law", r, tol(cfg, "twisted_law"));
  json doc = {{"particles", tw["particles"]}, {"generators", gens.size()}, {"table_size", table.size()},
              {"pool_size", table.sample_pool().size()}, {"samples", tw["samples"]}, {"max_residual", r},
              {"corrupted", tw["corrupt"]}};
  ctx.write_json("twisted_check.json", doc);
}

// --------------------------------------------------------------------- grw

void cmd_grw(RunContext& ctx) {
  const json& cfg = ctx.cfg();
  require_ring(cfg, "grw");
  const auto seed = require_seed(cfg);
  const auto& g = cfg["grw"];
  GrwParams p;
  p.lambda = g["lambda"];
  if (g["a"].is_string()) {
    if (g["a"] != "inf") throw SchemaError("/grw/a", "must be a positive number or \"inf\"");
    p.a = std::numeric_limits<double>::infinity();
  } else {
    p.a = g["a"];
    if (!(p.a > 0.0)) throw SchemaError("/grw/a", "must be positive");
  }
  p.allow_aperiodic = g["allow_aperiodic"];
  const WaveGrid s = build_state(cfg);
  const auto run = simulate_grw(s, build_potential(cfg, s.components), cfg["numerics"]["dt"], cfg["numerics"]["T"], p, seed);
  double twist = 0.0;
  for (const auto& e : run.events) twist = std::max(twist, e.twist_residual);
  if (!p.allow_aperiodic) ctx.invariant("grw_twist_residual", twist, tol(cfg, "twist"));
  ctx.invariant("norm_drift", norm_drift(run.final_state.norm()), tol(cfg, "norm"));
  ctx.write("events.csv", events_csv(run.events));
  ctx.write_json("grw.json", {{"events", run.events.size()}, {"candidates", run.candidates}, {"bound_log", run.log}});
  if (cfg["outputs"]["state"]) ctx.write_json("state.json", state_to_json(run.final_state));
}

json libraries() {
  return {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace

json stable_manifest(const json& manifest) {
  json m = manifest;
  m.erase("wall_time_s");
  return m;
}

RunOutcome run_command(const std::string& command, const json& config, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  json manifest = {{"schema", kManifestSchemaTag}, {"tool", "topobohm"}, {"version", kToolVersion},
                   {"libraries", libraries()},     {"command", command},  {"seed", 0}};
  manifest["config_digest"] = "fnv1a64:" + hex64(fnv1a64(config.dump()));
  if (config.is_object() && config.contains("seed") && config["seed"].is_number_integer() && config["seed"] >= 0)
    manifest["seed"] = config["seed"].get<std::uint64_t>();

  RunOutcome out;
  std::optional<RunContext> ctx;
  auto fail = [&](int code, const std::string& cls, const std::string& msg) {
    out.exit_code = code;
    manifest["failure"] = {{"class", cls}, {"message", msg}};
  };
  try {
    if (std::find(subcommands().begin(), subcommands().end(), command) == subcommands().end())
      throw SchemaError("/command", "unknown subcommand '" + command + "'");
    json cfg = effective_config(config);
    manifest["config_digest"] = "fnv1a64:" + hex64(fnv1a64(command + "\n" + cfg.dump()));
    ctx.emplace(cfg, out_dir);
    if (command == "evolve") cmd_evolve(*ctx);
    else if (command == "spectrum") cmd_spectrum(*ctx);
    else if (command == "trajectories") cmd_trajectories(*ctx);
    else if (command == "equivariance") cmd_equivariance(*ctx);
    else if (command == "ab-compare") cmd_ab_compare(*ctx);
    else if (command == "classify") cmd_classify(*ctx);
    else if (command == "twisted-check") cmd_twisted_check(*ctx);
    else cmd_grw(*ctx);
    ctx->finish();
  } catch (const SchemaError& e) {
    fail(kExitSchema, "schema", e.what());
    manifest["failure"]["path"] = e.path();
  } catch (const IncompatibleFactorError& e) {
    fail(kExitPhysics, "physics", e.what());
  } catch (const NonProjectableError& e) {
    fail(kExitPhysics, "physics", e.what());
  } catch (const DomainError& e) {
    fail(kExitPhysics, "physics", e.what());
  } catch (const ToleranceBreach& e) {
    fail(kExitNumerics, "numerics", e.what());
    manifest["failure"]["invariant"] = e.invariant();
  } catch (const std::exception& e) {
    fail(kExitInternal, "internal", e.what());
  }
  manifest["status"] = out.exit_code == kExitOk ? "ok" : "failed";
  manifest["exit_code"] = out.exit_code;
  manifest["invariants"] = ctx ? ctx->invariants_json() : json::array();
  manifest["files"] = ctx ? ctx->files_json() : json::array();
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  validate_schema(manifest, manifest_schema());
  write_atomic(out_dir, "manifest.json", manifest.dump(2) + "\n");
  out.manifest = std::move(manifest);
  return out;
}

}  // namespace topobohm
