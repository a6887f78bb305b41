#include "a2pm/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "a2pm/error.hpp"

namespace a2pm {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

json expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) bad("'" + where + "' must be a JSON object");
  return j;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) bad("'" + where + "' is missing required field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("field '" + key + "' in '" + where + "' has the wrong type");
  }
}

PipelineSpec parse_pipeline(const json& j) {
  PipelineSpec spec;
  spec.label_column = get_required<std::string>(j, "label_column", "pipeline");
  spec.drop_columns = get_or<std::vector<std::string>>(j, "drop_columns", {});
  spec.categorical_columns = get_or<std::vector<std::string>>(j, "categorical_columns", {});
  spec.min_category_frequency = get_or<double>(j, "min_category_frequency", 0.01);
  spec.integer_columns = get_or<std::vector<std::string>>(j, "integer_columns", {});
  spec.holdout_fraction = get_or<double>(j, "holdout_fraction", 0.30);
  spec.split_seed = get_or<std::uint64_t>(j, "split_seed", 0);
  spec.validate();
  return spec;
}

NamedPatternSpec parse_pattern(const json& j, std::size_t index) {
  const std::string where = "patterns[" + std::to_string(index) + "]";
  expect_object(j, where);
  const auto type = get_required<std::string>(j, "type", where);
  if (type == "interval") {
    NamedIntervalSpec spec;
    spec.features = get_required<std::vector<std::string>>(j, "features", where);
    spec.integer_features = get_or<std::vector<std::string>>(j, "integer", {});
    spec.probability = get_or<double>(j, "probability", 1.0);
    spec.momentum = get_or<double>(j, "momentum", 1.0);
    if (j.contains("ratio_range")) {
      auto range = get_required<std::vector<double>>(j, "ratio_range", where);
      if (range.size() != 2) bad("'" + where + ".ratio_range' must be [lo, hi]");
      spec.ratio = {range[0], range[1]};
    }
    return spec;
  }
  if (type == "combination") {
    NamedCombinationSpec spec;
    spec.modify = get_required<std::vector<std::string>>(j, "modify", where);
    spec.locked = get_or<std::vector<std::string>>(j, "locked", {});
    spec.probability = get_or<double>(j, "probability", 1.0);
    spec.momentum = get_or<double>(j, "momentum", 1.0);
    const auto mode = get_or<std::string>(j, "update_mode", "merge");
    if (mode == "merge")
      spec.mode = CombinationPattern::UpdateMode::Merge;
    else if (mode == "momentum")
      spec.mode = CombinationPattern::UpdateMode::Momentum;
    else
      bad("'" + where + ".update_mode' must be 'merge' or 'momentum'");
    return spec;
  }
  bad("'" + where + ".type' must be 'interval' or 'combination'");
}

AttackSettings parse_attack(const json& j) {
  AttackSettings settings;
  const auto mode = get_or<std::string>(j, "mode", "untargeted");
  if (mode == "untargeted") {
    settings.mode = AttackConfig::Mode::Untargeted;
  } else if (mode == "targeted") {
    settings.mode = AttackConfig::Mode::Targeted;
    settings.target_class = get_required<std::string>(j, "target_class", "attack");
  } else {
    bad("'attack.mode' must be 'untargeted' or 'targeted'");
  }
  settings.max_iterations = get_or<std::size_t>(j, "max_iterations", 50);
  settings.patience = get_or<std::size_t>(j, "patience", 5);
  settings.seed = get_or<std::uint64_t>(j, "seed", 0);
  settings.record_metrics = get_or<bool>(j, "record_metrics", false);
  return settings;
}

OracleSettings parse_oracle(const json& j) {
  OracleSettings settings;
  const auto type = get_or<std::string>(j, "type", "builtin");
  if (type == "builtin") {
    settings.kind = OracleSettings::Kind::Builtin;
  } else if (type == "external") {
    settings.kind = OracleSettings::Kind::External;
    settings.command = get_required<std::string>(j, "command", "oracle");
  } else {
    bad("'oracle.type' must be 'builtin' or 'external'");
  }
  settings.timeout =
      std::chrono::milliseconds(get_or<std::int64_t>(j, "timeout_ms", 30000));
  return settings;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  expect_object(doc, "config");

  RunConfig config;
  if (doc.contains("pipeline")) config.pipeline = parse_pipeline(doc.at("pipeline"));
  if (doc.contains("patterns")) {
    const auto& arr = doc.at("patterns");
    if (!arr.is_array()) bad("'patterns' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      config.patterns.push_back(parse_pattern(arr[i], i));
  }
  config.excluded_classes =
      get_or<std::vector<std::string>>(doc, "excluded_classes", {});
  if (doc.contains("attack")) config.attack = parse_attack(doc.at("attack"));
  if (doc.contains("oracle")) config.oracle = parse_oracle(doc.at("oracle"));
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

namespace {

// A name resolves to a single column, or to every member of the one-hot
// group whose source column it names.
std::vector<std::size_t> resolve_name(const std::string& name,
                                      const FeatureSchema& schema) {
  if (auto idx = schema.feature_index(name)) return {*idx};
  const auto groups = schema.one_hot_groups();
  if (auto it = groups.find(name); it != groups.end()) return it->second;
  throw ConfigError("pattern feature '" + name +
                    "' matches no column or one-hot group in the schema");
}

std::vector<std::size_t> resolve_names(const std::vector<std::string>& names,
                                       const FeatureSchema& schema) {
  std::vector<std::size_t> out;
  std::set<std::size_t> seen;
  for (const auto& name : names)
    for (std::size_t idx : resolve_name(name, schema))
      if (seen.insert(idx).second) out.push_back(idx);
  return out;
}

}  // namespace

BaseConfig resolve_patterns(const RunConfig& config, const FeatureSchema& schema) {
  BaseConfig base;
  base.excluded_classes = config.excluded_classes;
  for (const auto& named : config.patterns) {
    if (const auto* interval = std::get_if<NamedIntervalSpec>(&named)) {
      IntervalPattern::Spec spec;
      spec.features = resolve_names(interval->features, schema);
      spec.integer_features = resolve_names(interval->integer_features, schema);
      spec.probability = interval->probability;
      spec.momentum = interval->momentum;
      spec.ratio = interval->ratio;
      base.patterns.emplace_back(std::move(spec));
    } else {
      const auto& combination = std::get<NamedCombinationSpec>(named);
      CombinationPattern::Spec spec;
      spec.modify = resolve_names(combination.modify, schema);
      spec.locked = resolve_names(combination.locked, schema);
      spec.probability = combination.probability;
      spec.momentum = combination.momentum;
      spec.mode = combination.mode;
      base.patterns.emplace_back(std::move(spec));
    }
  }
  base.validate(schema);
  return base;
}

AttackConfig resolve_attack(const RunConfig& config, const FeatureSchema& schema) {
  AttackConfig cfg;
  cfg.mode = config.attack.mode;
  if (cfg.mode == AttackConfig::Mode::Targeted) {
    const auto cls = schema.class_index(config.attack.target_class);
    if (!cls)
      throw ConfigError("target class '" + config.attack.target_class +
                        "' not in schema");
    cfg.target_class = *cls;
  }
  cfg.max_iterations = config.attack.max_iterations;
  cfg.patience = config.attack.patience;
  cfg.seed = config.attack.seed;
  cfg.record_metrics = config.attack.record_metrics;
  cfg.validate(schema);
  return cfg;
}

}  // namespace a2pm
