#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "topobohm/errors.hpp"
#include "topobohm/runner.hpp"

using nlohmann::json;

namespace {

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw topobohm::SchemaError("", "cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw topobohm::SchemaError("", std::string("config is not valid JSON: ") + e.what());
  }
}

// "--set /numerics/dt=0.001": the value is parsed as JSON, falling back to a string.
void apply_set(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || assignment.empty() || assignment[0] != '/')
    throw topobohm::SchemaError("", "--set expects /json/pointer=value, got '" + assignment + "'");
  const std::string value = assignment.substr(eq + 1);
  json v = json::parse(value, nullptr, false);
  if (v.is_discarded()) v = value;
  cfg[json::json_pointer(assignment.substr(0, eq))] = v;
}

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> beta, flux, charge, dt, t_end, lambda, a;
  std::optional<int> n_points, samples, levels, sector;
  std::optional<std::string> factor_kind, potential_kind;
  bool allow_aperiodic = false;
  bool corrupt = false;
  std::vector<std::string> sets;
};

json build_config(const std::string& command, const Overrides& o) {
  json cfg = o.config.empty() ? json::object() : read_config(o.config);
  if (!cfg.is_object()) throw topobohm::SchemaError("", "config must be a JSON object");
  if (!cfg.contains("schema")) cfg["schema"] = "topobohm.scenario/1";
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.flux) {
    cfg["factor"] = {{"kind", "flux"}, {"flux", *o.flux}};
    if (o.charge) cfg["factor"]["charge"] = *o.charge;
  } else if (o.charge) {
    cfg["units"]["charge"] = *o.charge;
  }
  if (o.beta) cfg["factor"] = {{"kind", "character"}, {"beta", *o.beta}};
  if (o.sector) cfg["factor"]["sector"] = *o.sector;
  if (o.factor_kind) cfg["factor"]["kind"] = *o.factor_kind;
  if (o.potential_kind) cfg["potential"]["kind"] = *o.potential_kind;
  if (o.n_points) cfg["space"]["n_points"] = *o.n_points;
  if (o.dt) cfg["numerics"]["dt"] = *o.dt;
  if (o.t_end) cfg["numerics"]["T"] = *o.t_end;
  if (o.levels) cfg["numerics"]["n_levels"] = *o.levels;
  if (o.samples) {
    if (command == "equivariance") cfg["equivariance"]["samples"] = *o.samples;
    else if (command == "twisted-check") cfg["twisted"]["samples"] = *o.samples;
    else if (command == "classify") cfg["potential"]["samples"] = *o.samples;
    else cfg["trajectories"]["count"] = *o.samples;
  }
  if (o.lambda) cfg["grw"]["lambda"] = *o.lambda;
  if (o.a) cfg["grw"]["a"] = *o.a;
  if (o.allow_aperiodic) cfg["grw"]["allow_aperiodic"] = true;
  if (o.corrupt) cfg["twisted"]["corrupt"] = true;
  for (const auto& s : o.sets) apply_set(cfg, s);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topobohm: Bohmian mechanics with topological factors"};
  app.require_subcommand(1, 1);
  Overrides o;
  const char* env_out = std::getenv(topobohm::kOutDirEnv);
  o.out = env_out && *env_out ? env_out : "topobohm-out";

  for (const auto& name : topobohm::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "scenario JSON");
    sub->add_option("--out", o.out, "output directory (default $TOPOBOHM_OUT or ./topobohm-out)");
    sub->add_option("--seed", o.seed, "RNG seed (required by randomized subcommands)");
    sub->add_option("--beta", o.beta, "character phase of the ring factor");
    sub->add_option("--flux", o.flux, "enclosed flux; selects the vector-potential gauge");
    sub->add_option("--charge", o.charge, "particle charge");
    sub->add_option("--sector", o.sector, "exchange sector for two-particle runs");
    sub->add_option("--factor", o.factor_kind, "factor kind");
    sub->add_option("--potential", o.potential_kind, "potential kind");
    sub->add_option("--n-points", o.n_points, "grid points (power of two)");
    sub->add_option("--dt", o.dt, "time step");
    sub->add_option("--T", o.t_end, "end time");
    sub->add_option("--levels", o.levels, "number of eigenvalues");
    sub->add_option("--samples", o.samples, "ensemble / trajectory / sample count");
    sub->add_option("--lambda", o.lambda, "GRW collapse rate");
    sub->add_option("--width", o.a, "GRW collapse width");
    sub->add_flag("--allow-aperiodic", o.allow_aperiodic, "skip the GRW twist check");
    sub->add_flag("--corrupt", o.corrupt, "corrupt one twisted-table entry (negative control)");
    sub->add_option("--set", o.sets, "override any field: /json/pointer=value");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  json cfg;
  try {
    cfg = build_config(command, o);
  } catch (const topobohm::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return topobohm::kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return topobohm::kExitSchema;
  }
  const auto r = topobohm::run_command(command, cfg, o.out);
  const auto& m = r.manifest;
  for (const auto& inv : m["invariants"])
    std::cout << (inv["pass"].get<bool>() ? "ok   " : "FAIL ") << inv["id"].get<std::string>() << " residual "
              << inv["residual"].dump() << " tolerance " << inv["tolerance"].dump() << "\n";
  for (const auto& f : m["files"]) std::cout << "wrote " << (std::filesystem::path(o.out) / f["name"].get<std::string>()).string() << "\n";
  if (m.contains("failure")) {
    const auto& f = m["failure"];
    std::cerr << f["class"].get<std::string>() << " error";
    std::cerr << ": " << f["message"].get<std::string>() << "\n";
  }
  return r.exit_code;
}
