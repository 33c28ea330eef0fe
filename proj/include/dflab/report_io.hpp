#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace dflab {

/// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double v);

/// JSON-safe number: non-finite values become null.
nlohmann::json json_number(double v);

/// Writes `text` to dir/name, creating dir. Returns the file name for manifests.
std::string write_text(const std::filesystem::path& dir, const std::string& name,
                       const std::string& text);
std::string write_json(const std::filesystem::path& dir, const std::string& name,
                       const nlohmann::json& j);

}  // namespace dflab
