#include "a2pm/state_io.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "a2pm/error.hpp"

namespace a2pm {

namespace {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text << '\n';
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

const char* kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Continuous: return "continuous";
    case FeatureKind::DiscreteInteger: return "integer";
    case FeatureKind::CategoricalEncoded: return "categorical";
  }
  return "continuous";
}

FeatureKind kind_from_name(const std::string& name) {
  if (name == "continuous") return FeatureKind::Continuous;
  if (name == "integer") return FeatureKind::DiscreteInteger;
  if (name == "categorical") return FeatureKind::CategoricalEncoded;
  throw DataError("unknown feature kind '" + name + "'");
}

json schema_to_doc(const FeatureSchema& schema) {
  json features = json::array();
  for (const auto& f : schema.features) {
    json doc{{"name", f.name}, {"kind", kind_name(f.kind)}};
    if (f.kind == FeatureKind::CategoricalEncoded) doc["group"] = f.group;
    features.push_back(std::move(doc));
  }
  return json{{"features", std::move(features)}, {"classes", schema.class_names}};
}

FeatureSchema schema_from_doc(const json& doc) {
  FeatureSchema schema;
  for (const auto& f : doc.at("features")) {
    Feature feature;
    feature.name = f.at("name").get<std::string>();
    feature.kind = kind_from_name(f.at("kind").get<std::string>());
    if (f.contains("group")) feature.group = f.at("group").get<std::string>();
    schema.features.push_back(std::move(feature));
  }
  schema.class_names = doc.at("classes").get<std::vector<std::string>>();
  schema.validate();
  return schema;
}

json pattern_spec_to_doc(const PatternSpec& spec) {
  if (const auto* interval = std::get_if<IntervalPattern::Spec>(&spec)) {
    return json{{"type", "interval"},
                {"features", interval->features},
                {"integer", interval->integer_features},
                {"probability", interval->probability},
                {"momentum", interval->momentum},
                {"ratio_range", {interval->ratio.lo, interval->ratio.hi}}};
  }
  const auto& combination = std::get<CombinationPattern::Spec>(spec);
  return json{{"type", "combination"},
              {"modify", combination.modify},
              {"locked", combination.locked},
              {"probability", combination.probability},
              {"momentum", combination.momentum},
              {"update_mode",
               combination.mode == CombinationPattern::UpdateMode::Merge ? "merge"
                                                                         : "momentum"}};
}

PatternSpec pattern_spec_from_doc(const json& doc) {
  const auto type = doc.at("type").get<std::string>();
  if (type == "interval") {
    IntervalPattern::Spec spec;
    spec.features = doc.at("features").get<std::vector<std::size_t>>();
    spec.integer_features = doc.at("integer").get<std::vector<std::size_t>>();
    spec.probability = doc.at("probability").get<double>();
    spec.momentum = doc.at("momentum").get<double>();
    const auto range = doc.at("ratio_range").get<std::vector<double>>();
    if (range.size() != 2) throw DataError("ratio_range must be [lo, hi]");
    spec.ratio = {range[0], range[1]};
    return spec;
  }
  if (type == "combination") {
    CombinationPattern::Spec spec;
    spec.modify = doc.at("modify").get<std::vector<std::size_t>>();
    spec.locked = doc.at("locked").get<std::vector<std::size_t>>();
    spec.probability = doc.at("probability").get<double>();
    spec.momentum = doc.at("momentum").get<double>();
    const auto mode = doc.at("update_mode").get<std::string>();
    spec.mode = mode == "merge" ? CombinationPattern::UpdateMode::Merge
                                : CombinationPattern::UpdateMode::Momentum;
    return spec;
  }
  throw DataError("unknown pattern type '" + type + "'");
}

json fitted_pattern_to_doc(const FittedPattern& pat) {
  if (const auto* interval = std::get_if<IntervalPattern>(&pat)) {
    json doc = pattern_spec_to_doc(PatternSpec{interval->spec()});
    std::vector<double> mins;
    std::vector<double> maxs;
    for (std::size_t i = 0; i < interval->spec().features.size(); ++i) {
      mins.push_back(interval->minimum(i));
      maxs.push_back(interval->maximum(i));
    }
    doc["min"] = mins;
    doc["max"] = maxs;
    doc["batches"] = interval->fitted_batches();
    return doc;
  }
  const auto& combination = std::get<CombinationPattern>(pat);
  json doc = pattern_spec_to_doc(PatternSpec{combination.spec()});
  doc["combinations"] = combination.combinations();
  doc["batches"] = combination.fitted_batches();
  return doc;
}

FittedPattern fitted_pattern_from_doc(const json& doc) {
  PatternSpec spec = pattern_spec_from_doc(doc);
  const auto batches = doc.at("batches").get<std::size_t>();
  if (auto* interval = std::get_if<IntervalPattern::Spec>(&spec)) {
    return IntervalPattern::restore(std::move(*interval),
                                    doc.at("min").get<std::vector<double>>(),
                                    doc.at("max").get<std::vector<double>>(), batches);
  }
  return CombinationPattern::restore(
      std::move(std::get<CombinationPattern::Spec>(spec)),
      doc.at("combinations").get<std::vector<std::vector<double>>>(), batches);
}

}  // namespace

std::string schema_to_json(const FeatureSchema& schema) {
  return schema_to_doc(schema).dump(2);
}

FeatureSchema schema_from_json(const std::string& text) {
  try {
    return schema_from_doc(parse(text, "schema"));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed schema document: ") + e.what());
  }
}

void save_schema(const FeatureSchema& schema, const std::filesystem::path& path) {
  write_text(path, schema_to_json(schema));
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  return schema_from_json(read_text(path));
}

std::string encoding_to_json(const EncodingMap& encoding) {
  json columns = json::array();
  for (const auto& enc : encoding.columns)
    columns.push_back(json{{"column", enc.column},
                           {"categories", enc.categories},
                           {"other_label", EncodingMap::kOtherLabel}});
  return json{{"columns", std::move(columns)}}.dump(2);
}

EncodingMap encoding_from_json(const std::string& text) {
  try {
    EncodingMap encoding;
    const json doc = parse(text, "encoding");
    for (const auto& c : doc.at("columns")) {
      CategoryEncoding enc;
      enc.column = c.at("column").get<std::string>();
      enc.categories = c.at("categories").get<std::vector<std::string>>();
      encoding.columns.push_back(std::move(enc));
    }
    return encoding;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed encoding document: ") + e.what());
  }
}

void save_encoding(const EncodingMap& encoding, const std::filesystem::path& path) {
  write_text(path, encoding_to_json(encoding));
}

EncodingMap load_encoding(const std::filesystem::path& path) {
  return encoding_from_json(read_text(path));
}

std::string state_to_json(const A2pmState& state) {
  json base = json::array();
  for (const auto& spec : state.config().patterns)
    base.push_back(pattern_spec_to_doc(spec));

  json per_class = json::object();
  for (const auto& [cls, seq] : state.per_class()) {
    json patterns = json::array();
    for (const auto& pat : seq.patterns())
      patterns.push_back(fitted_pattern_to_doc(pat));
    per_class[std::to_string(cls)] = std::move(patterns);
  }

  return json{{"schema", schema_to_doc(state.schema())},
              {"excluded_classes", state.config().excluded_classes},
              {"base_config", std::move(base)},
              {"per_class", std::move(per_class)}}
      .dump(2);
}

A2pmState state_from_json(const std::string& text) {
  try {
    const json doc = parse(text, "state");
    FeatureSchema schema = schema_from_doc(doc.at("schema"));

    BaseConfig config;
    config.excluded_classes =
        doc.at("excluded_classes").get<std::vector<std::string>>();
    for (const auto& p : doc.at("base_config"))
      config.patterns.push_back(pattern_spec_from_doc(p));

    std::map<int, PatternSequence> per_class;
    for (const auto& [key, value] : doc.at("per_class").items()) {
      int cls = 0;
      const auto res = std::from_chars(key.data(), key.data() + key.size(), cls);
      if (res.ec != std::errc{} || res.ptr != key.data() + key.size())
        throw DataError("state per_class key '" + key + "' is not a class index");
      std::vector<FittedPattern> patterns;
      for (const auto& p : value) patterns.push_back(fitted_pattern_from_doc(p));
      per_class.emplace(cls, PatternSequence::restore(std::move(patterns)));
    }
    return A2pmState::restore(std::move(schema), std::move(config), std::move(per_class));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed state document: ") + e.what());
  }
}

void save_state(const A2pmState& state, const std::filesystem::path& path) {
  write_text(path, state_to_json(state));
}

A2pmState load_state(const std::filesystem::path& path) {
  return state_from_json(read_text(path));
}

}  // namespace a2pm
