#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace dflab {

/// The experiment schema shipped in schema/experiment.schema.json.
const nlohmann::json& experiment_schema();

/// Checks `instance` against the subset of JSON Schema used by the shipped
/// schema: type, properties, required, additionalProperties, items,
/// minItems, enum, const, minimum, maximum, exclusiveMinimum. Returns one
/// message per violation, prefixed with the JSON pointer of the offending value.
std::vector<std::string> validate(const nlohmann::json& schema, const nlohmann::json& instance);

/// Inserts every missing property that has a "default", recursing into
/// objects (including the defaults just inserted).
nlohmann::json apply_defaults(const nlohmann::json& schema, const nlohmann::json& instance);

/// Validate, fill defaults, validate again. Throws ConfigError listing all
/// violations.
nlohmann::json load_experiment_config(const nlohmann::json& raw);

}  // namespace dflab
