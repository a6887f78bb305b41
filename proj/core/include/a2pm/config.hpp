#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "a2pm/attack.hpp"
#include "a2pm/patterns.hpp"
#include "a2pm/pipeline.hpp"

namespace a2pm {

// Pattern descriptions with features referenced by name. A name may be a
// single post-encoding column or a one-hot group's source column, which
// expands to all member columns.
struct NamedIntervalSpec {
  std::vector<std::string> features;
  std::vector<std::string> integer_features;
  double probability = 1.0;
  double momentum = 1.0;
  RatioRange ratio;
};

struct NamedCombinationSpec {
  std::vector<std::string> modify;
  std::vector<std::string> locked;
  double probability = 1.0;
  double momentum = 1.0;
  CombinationPattern::UpdateMode mode = CombinationPattern::UpdateMode::Merge;
};

using NamedPatternSpec = std::variant<NamedIntervalSpec, NamedCombinationSpec>;

struct AttackSettings {
  AttackConfig::Mode mode = AttackConfig::Mode::Untargeted;
  std::string target_class;  // by name, Targeted only
  std::size_t max_iterations = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  bool record_metrics = false;
};

struct OracleSettings {
  enum class Kind { Builtin, External };
  Kind kind = Kind::Builtin;
  std::string command;  // External only
  std::chrono::milliseconds timeout{30000};
};

struct RunConfig {
  PipelineSpec pipeline;
  std::vector<NamedPatternSpec> patterns;
  std::vector<std::string> excluded_classes;
  AttackSettings attack;
  OracleSettings oracle;
};

// Parses the JSON config document. Throws ConfigError with the offending key
// on any malformed or unknown field.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

// Resolves pattern feature names against a post-preprocessing schema.
BaseConfig resolve_patterns(const RunConfig& config, const FeatureSchema& schema);

// Resolves the attack section (target class by name) against a schema.
AttackConfig resolve_attack(const RunConfig& config, const FeatureSchema& schema);

}  // namespace a2pm
