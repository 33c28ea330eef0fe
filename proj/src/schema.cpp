#include "dflab/schema.hpp"

#include <sstream>

#include "dflab/error.hpp"
#include "schema_text.hpp"

namespace dflab {

const nlohmann::json& experiment_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(detail::kExperimentSchema);
  return schema;
}

namespace {

bool has_type(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  throw std::logic_error("schema uses unknown type '" + t + "'");
}

std::string describe(const nlohmann::json& v) {
  std::string s = v.dump();
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& path,
           std::vector<std::string>& out) {
  const std::string where = path.empty() ? "/" : path;
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(v, t.get<std::string>());
    } else {
      for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
    }
    if (!ok) {
      out.push_back(where + ": expected type " + t.dump() + ", got " + describe(v));
      return;
    }
  }
  if (schema.contains("const") && v != schema["const"])
    out.push_back(where + ": must equal " + schema["const"].dump());
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == v;
    if (!found) out.push_back(where + ": " + describe(v) + " is not one of " + schema["enum"].dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>())
      out.push_back(where + ": " + describe(v) + " is below the minimum " + schema["minimum"].dump());
    if (schema.contains("maximum") && x > schema["maximum"].get<double>())
      out.push_back(where + ": " + describe(v) + " is above the maximum " + schema["maximum"].dump());
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
      out.push_back(where + ": " + describe(v) + " must exceed " + schema["exclusiveMinimum"].dump());
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
      out.push_back(where + ": needs at least " + schema["minItems"].dump() + " items");
    if (schema.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        check(schema["items"], v[i], path + "/" + std::to_string(i), out);
  }
  if (v.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"])
        if (!v.contains(r.get<std::string>()))
          out.push_back(where + ": missing required property '" + r.get<std::string>() + "'");
    const bool closed = schema.value("additionalProperties", true) == false;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (schema.contains("properties") && schema["properties"].contains(it.key())) {
        check(schema["properties"][it.key()], it.value(), path + "/" + it.key(), out);
      } else if (closed) {
        out.push_back(where + ": unknown property '" + it.key() + "'");
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate(const nlohmann::json& schema, const nlohmann::json& instance) {
  std::vector<std::string> out;
  check(schema, instance, "", out);
  return out;
}

nlohmann::json apply_defaults(const nlohmann::json& schema, const nlohmann::json& instance) {
  nlohmann::json out = instance;
  if (!out.is_object() || !schema.contains("properties")) return out;
  for (const auto& [key, sub] : schema["properties"].items()) {
    if (!out.contains(key)) {
      if (!sub.contains("default")) continue;
      out[key] = sub["default"];
    }
    out[key] = apply_defaults(sub, out[key]);
  }
  return out;
}

nlohmann::json load_experiment_config(const nlohmann::json& raw) {
  const auto& schema = experiment_schema();
  auto errors = validate(schema, raw);
  nlohmann::json filled;
  if (errors.empty()) {
    filled = apply_defaults(schema, raw);
    errors = validate(schema, filled);
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "config does not match the schema:";
    for (const auto& e : errors) msg << "\n  " << e;
    throw ConfigError(msg.str());
  }
  return filled;
}

}  // namespace dflab
