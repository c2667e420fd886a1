#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "topobohm/bohm.hpp"
#include "topobohm/grw.hpp"
#include "topobohm/propagator.hpp"

namespace topobohm {

inline constexpr const char* kStateSchemaTag = "topobohm.state/1";

/// State layout: {"schema", "space", "n_points", "components", "units",
/// "twist": {"beta"} or {"generator"}, "vector_potential", "chi": per
/// component a list of [re, im] pairs}.
nlohmann::json state_to_json(const WaveGrid& state);
WaveGrid state_from_json(const nlohmann::json& doc);
nlohmann::json state_to_json(const TorusGrid& state);

nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

/// "t,theta_1,...,winding_1,...,status" rows, one per recorded sample, with a
/// leading trajectory id column.
std::string trajectories_csv(const std::vector<Trajectory>& trajs);
std::string events_csv(const std::vector<CollapseEvent>& events);
std::string spectrum_csv(const std::vector<double>& levels, const std::vector<double>& analytic = {});

/// Fixed formatting for CSV numbers (17 significant digits).
std::string format_number(double x);

struct WrittenFile {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string digest;
};

/// Writes `content` to dir/name via a temporary file and rename, so a reader
/// never sees a partial file.
WrittenFile write_atomic(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace topobohm
