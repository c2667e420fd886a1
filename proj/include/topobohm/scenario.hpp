#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "topobohm/propagator.hpp"

namespace topobohm {

inline constexpr const char* kScenarioSchemaTag = "topobohm.scenario/1";

/// Every field the runner reads, with its default value.
const nlohmann::json& scenario_defaults();

/// Validates `config` against the published schema (SchemaError on failure)
/// and returns it merged over the defaults.
nlohmann::json effective_config(const nlohmann::json& config);

/// Builders over an effective config. Malformed but schema-valid input
/// (wrong sizes, missing seed, ...) raises SchemaError with the field path.
bool is_two_particle(const nlohmann::json& cfg);
int grid_points(const nlohmann::json& cfg);
std::uint64_t require_seed(const nlohmann::json& cfg);
MatrixRep build_factor(const nlohmann::json& cfg);
/// e·A for the flux factor kind, 0 otherwise.
double build_vector_potential(const nlohmann::json& cfg);
Potential build_potential(const nlohmann::json& cfg, int components);
/// Random Hermitian samples for the random_hermitian potential kind.
std::vector<CMatrix> random_hermitian_samples(int count, int dimension, std::uint64_t seed);
WaveGrid build_state(const nlohmann::json& cfg);
TorusGrid build_torus_state(const nlohmann::json& cfg);
std::vector<double> build_torus_potential(const nlohmann::json& cfg);
/// Number of time steps, checking that dt divides T.
long long build_steps(const nlohmann::json& cfg);

}  // namespace topobohm
