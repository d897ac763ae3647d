#include "schema.hpp"

#include <cmath>
#include <regex>
#include <set>
#include <stdexcept>

#include "config_schema_text.hpp"

namespace homogeig::cli {
namespace {

using json = nlohmann::json;

const std::set<std::string> kIgnored = {"$schema", "$id", "$defs", "title", "description", "default"};
const std::set<std::string> kKnown = {"type",      "const",     "enum",     "properties",       "required",
                                      "items",     "minItems",  "maxItems", "minimum",          "maximum",
                                      "pattern",   "oneOf",     "$ref",     "additionalProperties",
                                      "exclusiveMinimum", "exclusiveMaximum"};

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

bool is_integer(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d);
}

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return is_integer(v);
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  throw std::logic_error("schema uses unknown type '" + t + "'");
}

std::string show(const json& v) {
  std::string s = v.dump();
  return s.size() > 60 ? s.substr(0, 57) + "..." : s;
}

// Names a oneOf branch accepts at the top level: its enum values and the
// const of its "kind" property.
void branch_names(const json& branch, std::vector<std::string>& out) {
  if (branch.contains("enum"))
    for (const auto& v : branch["enum"]) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  if (branch.contains("properties") && branch["properties"].contains("kind") &&
      branch["properties"]["kind"].contains("const"))
    out.push_back(branch["properties"]["kind"]["const"].get<std::string>());
}

}  // namespace

SchemaValidator::SchemaValidator(json schema) : root_(std::move(schema)) {}

const json& SchemaValidator::resolve(const json& schema) const {
  if (!schema.contains("$ref")) return schema;
  const std::string ref = schema["$ref"].get<std::string>();
  if (ref.rfind("#/", 0) != 0) throw std::logic_error("only local schema references are supported: " + ref);
  return resolve(root_.at(json::json_pointer(ref.substr(1))));
}

std::vector<SchemaViolation> SchemaValidator::validate(const json& instance) const {
  std::vector<SchemaViolation> out;
  check(instance, root_, "", out);
  return out;
}

void SchemaValidator::check(const json& node, const json& schema_in, const std::string& path,
                            std::vector<SchemaViolation>& out) const {
  const json& schema = resolve(schema_in);
  for (const auto& [key, _] : schema.items())
    if (!kIgnored.count(key) && !kKnown.count(key)) throw std::logic_error("schema keyword not supported: " + key);

  if (schema.contains("oneOf")) {
    check_one_of(node, schema["oneOf"], path, out);
    return;
  }
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_array()) {
      for (const auto& x : t) ok = ok || has_type(node, x.get<std::string>());
    } else {
      ok = has_type(node, t.get<std::string>());
    }
    if (!ok) {
      out.push_back({path, "expected " + (t.is_array() ? t.dump() : t.get<std::string>()) + ", got " + show(node)});
      return;
    }
  }
  if (schema.contains("const") && node != schema["const"]) {
    out.push_back({path, "must be " + schema["const"].dump() + ", got " + show(node)});
    return;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) found = found || v == node;
    if (!found) {
      std::string list;
      for (const auto& v : schema["enum"]) list += (list.empty() ? "" : ", ") + v.dump();
      out.push_back({path, "must be one of " + list + ", got " + show(node)});
      return;
    }
  }
  if (node.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"]) {
        const std::string key = r.get<std::string>();
        if (!node.contains(key)) out.push_back({child(path, key), "required field is missing"});
      }
    const json empty = json::object();
    const json& props = schema.contains("properties") ? schema["properties"] : empty;
    const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
    for (const auto& [key, value] : node.items()) {
      if (props.contains(key)) {
        check(value, props[key], child(path, key), out);
      } else if (closed) {
        out.push_back({child(path, key), "unknown key"});
      }
    }
  }
  if (node.is_array()) {
    if (schema.contains("minItems") && node.size() < schema["minItems"].get<std::size_t>())
      out.push_back({path, "needs at least " + schema["minItems"].dump() + " items"});
    if (schema.contains("maxItems") && node.size() > schema["maxItems"].get<std::size_t>())
      out.push_back({path, "allows at most " + schema["maxItems"].dump() + " items"});
    if (schema.contains("items"))
      for (std::size_t i = 0; i < node.size(); ++i) check(node[i], schema["items"], item(path, i), out);
  }
  if (node.is_number()) {
    const double v = node.get<double>();
    if (schema.contains("minimum") && v < schema["minimum"].get<double>())
      out.push_back({path, "must be >= " + schema["minimum"].dump()});
    if (schema.contains("maximum") && v > schema["maximum"].get<double>())
      out.push_back({path, "must be <= " + schema["maximum"].dump()});
    if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>())
      out.push_back({path, "must be > " + schema["exclusiveMinimum"].dump()});
    if (schema.contains("exclusiveMaximum") && v >= schema["exclusiveMaximum"].get<double>())
      out.push_back({path, "must be < " + schema["exclusiveMaximum"].dump()});
  }
  if (node.is_string() && schema.contains("pattern")) {
    const std::regex re(schema["pattern"].get<std::string>());
    if (!std::regex_search(node.get<std::string>(), re))
      out.push_back({path, "does not match " + schema["pattern"].get<std::string>()});
  }
}

void SchemaValidator::check_one_of(const json& node, const json& branches, const std::string& path,
                                   std::vector<SchemaViolation>& out) const {
  std::vector<std::vector<SchemaViolation>> errs;
  int matches = 0;
  for (const auto& b : branches) {
    errs.emplace_back();
    check(node, b, path, errs.back());
    matches += errs.back().empty() ? 1 : 0;
  }
  if (matches == 1) return;
  if (matches > 1) {
    out.push_back({path, "matches more than one allowed form"});
    return;
  }
  // Report the branch the value evidently meant: one that failed below the
  // value itself, not on its type, enum or "kind".
  const std::string kind_path = child(path, "kind");
  const std::vector<SchemaViolation>* best = nullptr;
  for (const auto& e : errs) {
    const bool shallow = std::any_of(e.begin(), e.end(), [&](const SchemaViolation& v) {
      return v.path == path || v.path == kind_path;
    });
    if (!shallow && (!best || e.size() < best->size())) best = &e;
  }
  if (best) {
    out.insert(out.end(), best->begin(), best->end());
    return;
  }
  std::vector<std::string> names;
  for (const auto& b : branches) branch_names(resolve(b), names);
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  out.push_back({path, list.empty() ? "does not match any allowed form, got " + show(node)
                                    : "must be one of " + list + " (got " + show(node) + ")"});
}

json SchemaValidator::with_defaults(const json& instance) const {
  json copy = instance;
  fill(copy, root_);
  return copy;
}

void SchemaValidator::fill(json& node, const json& schema_in) const {
  const json& schema = resolve(schema_in);
  if (schema.contains("oneOf")) {
    for (const auto& b : schema["oneOf"]) {
      std::vector<SchemaViolation> e;
      check(node, b, "", e);
      if (e.empty()) {
        fill(node, b);
        return;
      }
    }
    return;
  }
  if (node.is_object() && schema.contains("properties")) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      const json& s = sub.contains("default") ? sub : resolve(sub);
      if (!node.contains(key) && s.contains("default")) node[key] = s["default"];
      if (node.contains(key)) fill(node[key], sub);
    }
  }
  if (node.is_array() && schema.contains("items"))
    for (auto& x : node) fill(x, schema["items"]);
}

const std::string& config_schema_text() {
  static const std::string text = kConfigSchemaText;
  return text;
}

const SchemaValidator& config_schema() {
  static const SchemaValidator v(json::parse(config_schema_text()));
  return v;
}

}  // namespace homogeig::cli
