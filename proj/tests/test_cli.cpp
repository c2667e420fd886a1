#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "topobohm/errors.hpp"
#include "topobohm/io.hpp"
#include "topobohm/runner.hpp"
#include "topobohm/scenario.hpp"
#include "topobohm/schema.hpp"
#include "topobohm/states.hpp"

using namespace topobohm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "topobohm-tests" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json scenario(json patch) {
  json base = {{"schema", "topobohm.scenario/1"}};
  if (!patch.is_null()) base.merge_patch(patch);
  return base;
}

std::string failure_path(const json& m) { return m["failure"].value("path", ""); }

}  // namespace

TEST_CASE("schema validator reports JSON-pointer paths") {
  CHECK_NOTHROW(validate_schema(scenario({}), scenario_schema()));
  CHECK_NOTHROW(validate_schema(scenario_defaults(), scenario_schema()));
  try {
    validate_schema(scenario({{"numerics", {{"dt", -1.0}}}}), scenario_schema());
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "/numerics/dt");
  }
  CHECK_THROWS_AS(validate_schema(scenario({{"bogus", 1}}), scenario_schema()), SchemaError);
  CHECK_THROWS_AS(validate_schema(json{{"schema", "other"}}, scenario_schema()), SchemaError);
  const json tiny = {{"type", "object"}, {"properties", {{"a", {{"type", "array"}, {"items", {{"type", "integer"}}}}}}}};
  try {
    validate_schema(json{{"a", {1, 2, "x"}}}, tiny);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "/a/2");
  }
}

TEST_CASE("state JSON round trip") {
  const auto s = wrapped_gaussian(32, 1.0, 0.5, 2.0, 0.6);
  const auto back = state_from_json(json::parse(state_to_json(s).dump()));
  CHECK(back.n == 32);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(back.at(0, j) - s.at(0, j)) < 1e-15);
  CHECK(std::abs(back.factor.generator_matrices().front()(0, 0) - std::polar(1.0, 0.6)) < 1e-15);
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("atomic writes leave no temporary files") {
  const auto dir = scratch("atomic");
  const auto f = write_atomic(dir, "a.txt", "hello\n");
  CHECK(f.bytes == 6);
  CHECK(f.digest.rfind("fnv1a64:", 0) == 0);
  CHECK(slurp(dir / "a.txt") == "hello\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("spectrum subcommand: free ring levels") {
  const auto out = scratch("spectrum");
  const auto r = run_command("spectrum", scenario({{"factor", {{"kind", "character"}, {"beta", 0.0}}}}), out);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out / "spectrum.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const double expect[] = {0, 0.5, 0.5, 2, 2, 4.5, 4.5, 8};
  for (double e : expect) {
    REQUIRE(std::getline(in, line));
    const double got = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(got - e) < 1e-9);
  }
}

TEST_CASE("ab-compare: vector potential and twisted runs agree") {
  const auto out = scratch("ab");
  const json cfg = scenario({{"factor", {{"kind", "flux"}, {"flux", 3.14159265}, {"charge", 1.0}}},
                             {"trajectories", {{"count", 10}}}});
  const auto r = run_command("ab-compare", cfg, out);
  CHECK(r.exit_code == 0);
  const json rep = json::parse(slurp(out / "ab_compare.json"));
  CHECK(rep["max_trajectory_deviation"].get<double>() <= 1e-6);
  CHECK(rep["max_spectrum_difference"].get<double>() <= 1e-10);
}

TEST_CASE("classify: Aharonov-Casher factor with V = 0 is C2") {
  const auto out = scratch("classify");
  const auto r = run_command("classify", scenario({{"factor", {{"kind", "aharonov_casher"}}}}), out);
  CHECK(r.exit_code == 0);
  const json rep = json::parse(slurp(out / "classification.json"));
  CHECK(rep["label"] == "C2");
  CHECK(rep["verdict"].get<std::string>().find("not given by a character") != std::string::npos);
}

TEST_CASE("exit codes partition by failure class") {
  SUBCASE("schema") {
    const auto r = run_command("evolve", scenario({{"space", {{"n_points", 100}}}}), scratch("e2"));
    CHECK(r.exit_code == 2);
    CHECK(failure_path(r.manifest) == "/space/n_points");
    const auto u = run_command("evolve", scenario({{"nonsense", true}}), scratch("e2b"));
    CHECK(u.exit_code == 2);
  }
  SUBCASE("physics") {
    const json cfg = scenario({{"factor", {{"kind", "aharonov_casher"}}},
                               {"potential", {{"kind", "pauli"}, {"coefficients", {0, 1, 0, 0}}}}});
    const auto r = run_command("evolve", cfg, scratch("e3"));
    CHECK(r.exit_code == 3);
    CHECK(r.manifest["failure"]["message"].get<std::string>().find("commute with every V(q)") != std::string::npos);
  }
  SUBCASE("numerics") {
    const json cfg = scenario({{"numerics", {{"T", 0.1}, {"tolerances", {{"norm", 1e-30}}}}}});
    const auto out = scratch("e4");
    const auto r = run_command("evolve", cfg, out);
    CHECK(r.exit_code == 4);
    CHECK(r.manifest["failure"]["invariant"] == "norm_drift");
    // Partial outputs are listed and exist.
    REQUIRE(r.manifest["files"].size() == 1);
    CHECK(fs::exists(out / "state.json"));
  }
  SUBCASE("missing seed") {
    const auto r = run_command("grw", scenario({}), scratch("seed"));
    CHECK(r.exit_code == 2);
    CHECK(failure_path(r.manifest) == "/seed");
  }
  SUBCASE("dt must divide T") {
    const auto r = run_command("evolve", scenario({{"numerics", {{"dt", 0.3}, {"T", 1.0}}}}), scratch("dt"));
    CHECK(r.exit_code == 2);
    CHECK(failure_path(r.manifest) == "/numerics/dt");
  }
}

TEST_CASE("manifests are schema-valid and byte-stable apart from wall time") {
  const json cfg = scenario({{"seed", 42}, {"numerics", {{"T", 1.0}, {"dt", 0.01}}}, {"trajectories", {{"count", 8}}}});
  const auto a = run_command("trajectories", cfg, scratch("m1"));
  const auto b = run_command("trajectories", cfg, scratch("m2"));
  CHECK(a.exit_code == 0);
  CHECK_NOTHROW(validate_schema(a.manifest, manifest_schema()));
  CHECK(stable_manifest(a.manifest).dump() == stable_manifest(b.manifest).dump());
  const auto root = fs::temp_directory_path() / "topobohm-tests";
  CHECK(slurp(root / "m1" / "trajectories.csv") == slurp(root / "m2" / "trajectories.csv"));
  const json on_disk = json::parse(slurp(root / "m1" / "manifest.json"));
  CHECK(stable_manifest(on_disk) == stable_manifest(a.manifest));
  CHECK(a.manifest["seed"] == 42);

  const auto failed = run_command("evolve", scenario({{"space", {{"n_points", 3}}}}), scratch("m3"));
  CHECK(failed.manifest["status"] == "failed");
  CHECK_NOTHROW(validate_schema(failed.manifest, manifest_schema()));
}

TEST_CASE("twisted-check and its corrupted control") {
  const auto ok = run_command("twisted-check", scenario({{"seed", 1}}), scratch("tw"));
  CHECK(ok.exit_code == 0);
  const auto bad = run_command("twisted-check", scenario({{"seed", 1}, {"twisted", {{"corrupt", true}}}}), scratch("tw2"));
  CHECK(bad.exit_code == 0);
  CHECK(bad.manifest["invariants"][0]["id"] == "twisted_law_corruption_detected");
}
