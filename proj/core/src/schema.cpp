#include "a2pm/schema.hpp"

#include <cmath>
#include <set>

#include "a2pm/error.hpp"

namespace a2pm {

std::optional<std::size_t> FeatureSchema::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  return std::nullopt;
}

std::optional<int> FeatureSchema::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < class_names.size(); ++i)
    if (class_names[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::map<std::string, std::vector<std::size_t>> FeatureSchema::one_hot_groups() const {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].kind == FeatureKind::CategoricalEncoded)
      groups[features[i].group].push_back(i);
  return groups;
}

void FeatureSchema::validate() const {
  std::set<std::string_view> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw ConfigError("feature with empty name");
    if (!seen.insert(f.name).second)
      throw ConfigError("duplicate feature name '" + f.name + "'");
    if (f.kind == FeatureKind::CategoricalEncoded && f.group.empty())
      throw ConfigError("categorical feature '" + f.name + "' has no group id");
    if (f.kind != FeatureKind::CategoricalEncoded && !f.group.empty())
      throw ConfigError("non-categorical feature '" + f.name + "' names group '" +
                        f.group + "'");
  }
  std::set<std::string_view> classes;
  for (const auto& c : class_names) {
    if (c.empty()) throw ConfigError("empty class name");
    if (!classes.insert(c).second)
      throw ConfigError("duplicate class name '" + c + "'");
  }
}

ClassMask ClassMask::all_except(const FeatureSchema& schema,
                                const std::vector<std::string>& excluded) {
  for (const auto& name : excluded)
    if (!schema.class_index(name))
      throw ConfigError("excluded class '" + name + "' not in schema");
  ClassMask mask;
  for (std::size_t c = 0; c < schema.class_count(); ++c) {
    bool is_excluded = false;
    for (const auto& name : excluded)
      if (schema.class_names[c] == name) is_excluded = true;
    mask.per_class[static_cast<int>(c)] = !is_excluded;
  }
  return mask;
}

std::vector<Violation> validate_dataset(const Dataset& ds) {
  std::vector<Violation> out;
  const std::size_t n = ds.values.rows();
  const std::size_t d = ds.schema.feature_count();

  if (ds.values.cols() != d && n > 0) {
    out.push_back({0, "<matrix>", "column count " + std::to_string(ds.values.cols()) +
                                      " does not match schema feature count " +
                                      std::to_string(d)});
    return out;
  }
  if (ds.labels.size() != n) {
    out.push_back({0, "<labels>", "label count " + std::to_string(ds.labels.size()) +
                                      " does not match row count " + std::to_string(n)});
    return out;
  }

  const int num_classes = static_cast<int>(ds.schema.class_count());
  for (std::size_t i = 0; i < n; ++i) {
    if (ds.labels[i] < 0 || ds.labels[i] >= num_classes)
      out.push_back({i, "<labels>", "label index " + std::to_string(ds.labels[i]) +
                                        " out of range"});
  }

  for (std::size_t j = 0; j < d; ++j) {
    if (ds.schema.features[j].kind != FeatureKind::DiscreteInteger) continue;
    for (std::size_t i = 0; i < n; ++i) {
      double v = ds.values(i, j);
      if (v != std::floor(v))
        out.push_back({i, ds.schema.features[j].name,
                       "discrete-integer value " + std::to_string(v) + " is not integral"});
    }
  }

  for (const auto& [group, members] : ds.schema.one_hot_groups()) {
    if (members.size() < 2) continue;  // binary flags carry no exclusivity rule
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      bool binary = true;
      for (std::size_t j : members) {
        double v = ds.values(i, j);
        if (v != 0.0 && v != 1.0) binary = false;
        sum += v;
      }
      if (!binary)
        out.push_back({i, group, "one-hot group contains a value outside {0,1}"});
      else if (sum != 1.0)
        out.push_back({i, group, "one-hot group sums to " + std::to_string(sum) +
                                     ", expected exactly 1"});
    }
  }
  return out;
}

Dataset select_rows(const Dataset& ds, const std::vector<bool>& mask) {
  if (mask.size() != ds.size())
    throw DataError("mask length " + std::to_string(mask.size()) +
                    " does not match row count " + std::to_string(ds.size()));
  Dataset out;
  out.schema = ds.schema;
  out.values = Matrix(0, ds.values.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    out.values.push_row(ds.values.row(i));
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

}  // namespace a2pm
