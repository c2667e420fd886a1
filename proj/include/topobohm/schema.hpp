#pragma once

#include <json.hpp>
#include <string>

namespace topobohm {

/// Validates a document against the JSON-Schema subset used by the published
/// schemas: type, const, enum, required, properties, additionalProperties
/// (boolean), items, minItems, maxItems, minimum, maximum, exclusiveMinimum and
/// local $ref. Throws SchemaError naming the first offending JSON pointer.
void validate_schema(const nlohmann::json& document, const nlohmann::json& schema);

/// The published schemas, embedded at build time.
const nlohmann::json& scenario_schema();
const nlohmann::json& manifest_schema();

}  // namespace topobohm
