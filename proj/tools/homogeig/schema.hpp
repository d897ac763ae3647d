#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace homogeig::cli {

struct SchemaViolation {
  /// Dotted location in the instance, e.g. "problem.bcs[1].beta"; "" for
  /// the root.
  std::string path;
  std::string message;
};

/// Validator for the JSON Schema subset used by docs/config.schema.json:
/// type, const, enum, properties, required, additionalProperties: false,
/// items, minItems, maxItems, minimum, maximum, exclusiveMinimum,
/// exclusiveMaximum, pattern, oneOf and local "#/$defs/..." references.
/// Any other keyword in the schema throws std::logic_error, so the
/// published schema cannot silently use something this class ignores.
class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema);

  std::vector<SchemaViolation> validate(const nlohmann::json& instance) const;

  /// Copy of a valid instance with every absent property that declares a
  /// "default" filled in, recursively.
  nlohmann::json with_defaults(const nlohmann::json& instance) const;

 private:
  const nlohmann::json& resolve(const nlohmann::json& schema) const;
  void check(const nlohmann::json& node, const nlohmann::json& schema, const std::string& path,
             std::vector<SchemaViolation>& out) const;
  void check_one_of(const nlohmann::json& node, const nlohmann::json& branches, const std::string& path,
                    std::vector<SchemaViolation>& out) const;
  void fill(nlohmann::json& node, const nlohmann::json& schema) const;

  nlohmann::json root_;
};

/// The schema shipped with the tool (docs/config.schema.json, embedded at
/// build time).
const SchemaValidator& config_schema();
const std::string& config_schema_text();

}  // namespace homogeig::cli
