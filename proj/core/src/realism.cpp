#include "a2pm/realism.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "a2pm/error.hpp"

namespace a2pm {

namespace {

// Columns that patterns after position j in the sequence may overwrite.
// Checks for pattern j ignore those columns; the later pattern has the last
// word on them.
std::vector<std::set<std::size_t>> shadow_sets(const PatternSequence& seq) {
  std::vector<std::set<std::size_t>> shadows(seq.size());
  std::set<std::size_t> acc;
  for (std::size_t j = seq.size(); j-- > 0;) {
    shadows[j] = acc;
    const auto& pat = seq.patterns()[j];
    if (const auto* interval = std::get_if<IntervalPattern>(&pat))
      acc.insert(interval->spec().features.begin(), interval->spec().features.end());
    else
      acc.insert(std::get<CombinationPattern>(pat).spec().modify.begin(),
                 std::get<CombinationPattern>(pat).spec().modify.end());
  }
  return shadows;
}

std::set<std::size_t> modifiable_columns(const PatternSequence& seq) {
  std::set<std::size_t> cols;
  for (const auto& pat : seq.patterns()) {
    if (const auto* interval = std::get_if<IntervalPattern>(&pat))
      cols.insert(interval->spec().features.begin(), interval->spec().features.end());
    else
      cols.insert(std::get<CombinationPattern>(pat).spec().modify.begin(),
                  std::get<CombinationPattern>(pat).spec().modify.end());
  }
  return cols;
}

void check_interval(const IntervalPattern& pat, const std::set<std::size_t>& shadow,
                    std::span<const double> adv, std::span<const double> orig,
                    std::size_t row, const FeatureSchema& schema,
                    std::vector<Violation>& out) {
  const auto& features = pat.spec().features;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::size_t col = features[i];
    if (shadow.count(col)) continue;
    if (adv[col] == orig[col]) continue;  // unchanged values are trivially realistic

    const auto& name = schema.features[col].name;
    const double m = pat.minimum(i);
    const double M = pat.maximum(i);
    if (adv[col] < m || adv[col] > M) {
      out.push_back({row, name, "interval: value outside the fitted [min, max]"});
      continue;
    }
    const bool integer =
        std::find(pat.spec().integer_features.begin(), pat.spec().integer_features.end(),
                  col) != pat.spec().integer_features.end();
    if (integer) {
      if (adv[col] != std::floor(adv[col]))
        out.push_back({row, name, "integer: perturbed value is not integral"});
      else if (adv[col] < std::ceil(m) || adv[col] > std::floor(M))
        out.push_back({row, name, "integer: value outside the integral subinterval"});
    }
  }
}

void check_combination(const CombinationPattern& pat, const std::set<std::size_t>& shadow,
                       std::span<const double> adv, std::span<const double> orig,
                       std::size_t row, const FeatureSchema& schema,
                       std::vector<Violation>& out) {
  const auto& cols = pat.columns();
  std::vector<std::size_t> relevant;  // tuple positions not shadowed
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (!shadow.count(cols[i])) relevant.push_back(i);

  bool net_change = false;
  for (std::size_t col : pat.spec().modify)
    if (!shadow.count(col) && adv[col] != orig[col]) net_change = true;
  if (!net_change) return;

  for (const auto& combo : pat.combinations()) {
    bool match = true;
    for (std::size_t i : relevant)
      if (combo[i] != adv[cols[i]]) {
        match = false;
        break;
      }
    if (match) return;
  }

  std::string group;
  for (std::size_t i : relevant) {
    if (!group.empty()) group += ",";
    group += schema.features[cols[i]].name;
  }
  out.push_back({row, group, "combination: tuple matches no recorded combination"});
}

}  // namespace

std::vector<Violation> realism_check(const Dataset& adversarial, const Dataset& original,
                                     const A2pmState& state) {
  if (adversarial.schema != state.schema() || original.schema != state.schema())
    throw DataError("schema mismatch between datasets and A2PM state");
  if (adversarial.size() != original.size())
    throw DataError("adversarial and original row counts differ");
  if (adversarial.labels != original.labels)
    throw DataError("adversarial and original labels differ");

  std::vector<Violation> out = validate_dataset(adversarial);
  const FeatureSchema& schema = state.schema();
  const std::size_t d = schema.feature_count();

  for (std::size_t row = 0; row < adversarial.size(); ++row) {
    const auto adv = adversarial.values.row(row);
    const auto orig = original.values.row(row);
    const int cls = adversarial.labels[row];

    if (!state.class_perturbable(cls)) {
      for (std::size_t col = 0; col < d; ++col)
        if (adv[col] != orig[col])
          out.push_back({row, schema.features[col].name,
                         "immutable: excluded-class row was modified"});
      continue;
    }

    const PatternSequence* seq = state.sequence_for(cls);
    if (!seq) {
      for (std::size_t col = 0; col < d; ++col)
        if (adv[col] != orig[col])
          out.push_back({row, schema.features[col].name,
                         "immutable: class has no fitted patterns"});
      continue;
    }

    const auto modifiable = modifiable_columns(*seq);
    for (std::size_t col = 0; col < d; ++col)
      if (!modifiable.count(col) && adv[col] != orig[col])
        out.push_back({row, schema.features[col].name,
                       "immutable: locked or untouched feature was modified"});

    const auto shadows = shadow_sets(*seq);
    for (std::size_t j = 0; j < seq->size(); ++j) {
      const auto& pat = seq->patterns()[j];
      if (const auto* interval = std::get_if<IntervalPattern>(&pat))
        check_interval(*interval, shadows[j], adv, orig, row, schema, out);
      else
        check_combination(std::get<CombinationPattern>(pat), shadows[j], adv, orig, row,
                          schema, out);
    }
  }
  return out;
}

std::string realism_summary(const std::vector<Violation>& violations,
                            std::size_t max_examples) {
  std::ostringstream out;
  if (violations.empty()) {
    out << "0 violations\n";
    return out.str();
  }

  std::map<std::string, std::size_t> by_rule;
  for (const auto& v : violations) {
    const auto colon = v.rule.find(':');
    by_rule[colon == std::string::npos ? v.rule : v.rule.substr(0, colon)]++;
  }
  out << violations.size() << " violation(s)\n";
  for (const auto& [rule, count] : by_rule) out << "  " << rule << ": " << count << '\n';
  for (std::size_t i = 0; i < std::min(max_examples, violations.size()); ++i) {
    const auto& v = violations[i];
    out << "  row " << v.row << ", " << v.where << ": " << v.rule << '\n';
  }
  if (violations.size() > max_examples)
    out << "  ... " << (violations.size() - max_examples) << " more\n";
  return out.str();
}

}  // namespace a2pm
