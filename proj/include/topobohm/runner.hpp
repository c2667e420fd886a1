#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace topobohm {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestSchemaTag = "topobohm.manifest/1";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TOPOBOHM_OUT";

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitSchema = 2, kExitPhysics = 3, kExitNumerics = 4 };

const std::vector<std::string>& subcommands();

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json manifest;
};

/// Run one subcommand on a scenario document. Outputs and manifest.json go
/// to `out_dir`; errors are mapped to exit codes and recorded in the
/// manifest rather than thrown.
RunOutcome run_command(const std::string& command, const nlohmann::json& config, const std::filesystem::path& out_dir);

/// Manifest without the wall-time field, for byte-stability comparisons.
nlohmann::json stable_manifest(const nlohmann::json& manifest);

}  // namespace topobohm
