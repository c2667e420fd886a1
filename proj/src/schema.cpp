#include "topobohm/schema.hpp"

#include <cmath>

#include "topobohm/errors.hpp"
#include "topobohm_schemas.hpp"

namespace topobohm {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  return false;
}

bool equal_values(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
  return a == b;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& v, const json& s, const std::string& path) const {
    if (s.contains("$ref")) {
      const std::string ref = s["$ref"];
      if (ref.rfind("#/", 0) != 0) throw std::logic_error("unsupported $ref " + ref);
      check(v, root_.at(json::json_pointer(ref.substr(1))), path);
      return;
    }
    const std::string where = path.empty() ? "/" : path;
    if (s.contains("type")) {
      const auto& t = s["type"];
      bool ok = false;
      if (t.is_string()) ok = has_type(v, t);
      for (const auto& e : t.is_array() ? t : json::array()) ok = ok || has_type(v, e);
      if (!ok) throw SchemaError(where, "expected type " + t.dump() + ", got " + std::string(v.type_name()));
    }
    if (s.contains("const") && !equal_values(v, s["const"]))
      throw SchemaError(where, "must equal " + s["const"].dump());
    if (s.contains("enum")) {
      bool ok = false;
      for (const auto& e : s["enum"]) ok = ok || equal_values(v, e);
      if (!ok) throw SchemaError(where, "must be one of " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) throw SchemaError(where, "must be >= " + s["minimum"].dump());
      if (s.contains("maximum") && x > s["maximum"].get<double>()) throw SchemaError(where, "must be <= " + s["maximum"].dump());
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        throw SchemaError(where, "must be > " + s["exclusiveMinimum"].dump());
    }
    if (v.is_object()) {
      for (const auto& r : s.value("required", json::array()))
        if (!v.contains(r.get<std::string>())) throw SchemaError(path + "/" + r.get<std::string>(), "required field is missing");
      const json props = s.value("properties", json::object());
      for (const auto& [key, val] : v.items()) {
        if (props.contains(key))
          check(val, props[key], path + "/" + key);
        else if (s.contains("additionalProperties") && s["additionalProperties"] == false)
          throw SchemaError(path + "/" + key, "unknown field");
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<size_t>())
        throw SchemaError(where, "needs at least " + s["minItems"].dump() + " items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<size_t>())
        throw SchemaError(where, "allows at most " + s["maxItems"].dump() + " items");
      if (s.contains("items"))
        for (size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "/" + std::to_string(i));
    }
  }

 private:
  const json& root_;
};

}  // namespace

void validate_schema(const nlohmann::json& document, const nlohmann::json& schema) {
  Validator(schema).check(document, schema, "");
}

const nlohmann::json& scenario_schema() {
  static const auto s = nlohmann::json::parse(schemas::kScenario);
  return s;
}

const nlohmann::json& manifest_schema() {
  static const auto s = nlohmann::json::parse(schemas::kManifest);
  return s;
}

}  // namespace topobohm
