#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "a2pm/matrix.hpp"

namespace a2pm {

enum class FeatureKind { Continuous, DiscreteInteger, CategoricalEncoded };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  // One-hot group this column belongs to; set iff kind is CategoricalEncoded.
  std::string group;

  bool operator==(const Feature&) const = default;
};

// Ordered feature list plus the class-label vocabulary. Feature order is the
// column order of every dataset using this schema.
struct FeatureSchema {
  std::vector<Feature> features;
  std::vector<std::string> class_names;

  std::size_t feature_count() const { return features.size(); }
  std::size_t class_count() const { return class_names.size(); }

  std::optional<std::size_t> feature_index(std::string_view name) const;
  std::optional<int> class_index(std::string_view name) const;

  // Group id -> member column indices, in column order.
  std::map<std::string, std::vector<std::size_t>> one_hot_groups() const;

  // Throws ConfigError if names are not unique, class names are empty, or a
  // categorical feature lacks a group id.
  void validate() const;

  bool operator==(const FeatureSchema&) const = default;
};

// Samples plus labels conforming to a schema. Immutable by convention after
// construction; safe to share read-only across workers.
struct Dataset {
  FeatureSchema schema;
  Matrix values;
  std::vector<int> labels;

  std::size_t size() const { return values.rows(); }
};

// Per-class perturbability. Classes absent from the map are not perturbable.
struct ClassMask {
  std::map<int, bool> per_class;

  bool perturbable(int class_index) const {
    auto it = per_class.find(class_index);
    return it != per_class.end() && it->second;
  }

  // Every schema class is perturbable except the named ones. Unknown names
  // throw ConfigError.
  static ClassMask all_except(const FeatureSchema& schema,
                              const std::vector<std::string>& excluded);
};

struct Violation {
  std::size_t row = 0;
  std::string where;  // feature or group name
  std::string rule;

  bool operator==(const Violation&) const = default;
};

// Empty result iff all Dataset invariants hold: column count matches the
// schema, labels are in range, DiscreteInteger columns are integral, and
// every one-hot group with >= 2 members is exclusive (values 0/1, sum 1).
std::vector<Violation> validate_dataset(const Dataset& ds);

// Keeps rows where mask is true; schema shared, labels filtered consistently.
Dataset select_rows(const Dataset& ds, const std::vector<bool>& mask);

}  // namespace a2pm
