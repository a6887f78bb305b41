#include "a2pm/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "a2pm/error.hpp"

namespace a2pm {

namespace {

void check_indices(const std::vector<std::size_t>& indices, std::size_t column_count,
                   const char* what) {
  std::set<std::size_t> seen;
  for (std::size_t idx : indices) {
    if (idx >= column_count)
      throw ConfigError(std::string(what) + " index " + std::to_string(idx) +
                        " out of bounds for " + std::to_string(column_count) + " columns");
    if (!seen.insert(idx).second)
      throw ConfigError(std::string(what) + " index " + std::to_string(idx) + " repeated");
  }
}

bool is_subset(const std::vector<std::size_t>& sub, const std::vector<std::size_t>& super) {
  for (std::size_t idx : sub)
    if (std::find(super.begin(), super.end(), idx) == super.end()) return false;
  return true;
}

// Exact-equality key; -0.0 folds onto +0.0 so hashing agrees with ==.
std::string value_key(std::span<const double> values) {
  std::string key(values.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i] == 0.0 ? 0.0 : values[i];
    std::memcpy(key.data() + i * sizeof(double), &v, sizeof(double));
  }
  return key;
}

}  // namespace

void IntervalPattern::Spec::validate(std::size_t column_count) const {
  if (features.empty()) throw ConfigError("interval pattern modifies no features");
  check_indices(features, column_count, "interval feature");
  check_indices(integer_features, column_count, "interval integer feature");
  if (!is_subset(integer_features, features))
    throw ConfigError("interval integer features must be a subset of its features");
  if (!(probability > 0.0 && probability <= 1.0))
    throw ConfigError("interval probability must be in (0, 1]");
  if (!(momentum >= 0.0 && momentum <= 1.0))
    throw ConfigError("interval momentum must be in [0, 1]");
  if (!(ratio.lo > 0.0 && ratio.lo <= ratio.hi && ratio.hi <= 1.0))
    throw ConfigError("interval ratio range must satisfy 0 < lo <= hi <= 1");
}

IntervalPattern::IntervalPattern(Spec spec) : spec_(std::move(spec)) {
  integer_.resize(spec_.features.size(), false);
  for (std::size_t i = 0; i < spec_.features.size(); ++i)
    integer_[i] = std::find(spec_.integer_features.begin(), spec_.integer_features.end(),
                            spec_.features[i]) != spec_.integer_features.end();
  min_.resize(spec_.features.size(), 0.0);
  max_.resize(spec_.features.size(), 0.0);
}

void IntervalPattern::fit(const Matrix& batch) {
  if (batch.empty()) throw DataError("interval fit on empty batch");
  for (std::size_t col : spec_.features)
    if (col >= batch.cols())
      throw DataError("batch has " + std::to_string(batch.cols()) +
                      " columns, interval pattern needs column " + std::to_string(col));

  for (std::size_t i = 0; i < spec_.features.size(); ++i) {
    const std::size_t col = spec_.features[i];
    double lo = batch(0, col);
    double hi = batch(0, col);
    for (std::size_t r = 1; r < batch.rows(); ++r) {
      lo = std::min(lo, batch(r, col));
      hi = std::max(hi, batch(r, col));
    }
    if (batches_ == 0) {
      min_[i] = lo;
      max_[i] = hi;
    } else {
      const double k = spec_.momentum;
      double m = min_[i] * k + lo * (1.0 - k);
      double M = max_[i] * k + hi * (1.0 - k);
      if (m > M) m = M = (m + M) / 2.0;  // keeps m <= M under pathological input
      min_[i] = m;
      max_[i] = M;
    }
  }
  ++batches_;
}

void IntervalPattern::perturb(std::span<double> row, RandomSource& rng) const {
  if (!fitted()) throw StateError("interval pattern is not fitted");
  for (std::size_t i = 0; i < spec_.features.size(); ++i) {
    const std::size_t col = spec_.features[i];
    if (col >= row.size())
      throw DataError("row has " + std::to_string(row.size()) +
                      " columns, interval pattern needs column " + std::to_string(col));
    if (!rng.chance(spec_.probability)) continue;

    const double m = min_[i];
    const double M = max_[i];
    const double value = row[col];
    const double epsilon = rng.uniform(spec_.ratio.lo, spec_.ratio.hi);
    const double magnitude = (M - m) * epsilon;

    // Direction is a fair coin inside the interval, forced at the endpoints.
    double sign;
    if (value <= m)
      sign = 1.0;
    else if (value >= M)
      sign = -1.0;
    else
      sign = rng.coin() ? 1.0 : -1.0;

    double result = std::clamp(value + sign * magnitude, m, M);
    if (integer_[i]) {
      const double lo = std::ceil(m);
      const double hi = std::floor(M);
      if (lo > hi) continue;  // no integer in the interval; leave the value alone
      result = std::clamp(std::round(result), lo, hi);
    }
    row[col] = result;
  }
}

IntervalPattern IntervalPattern::restore(Spec spec, std::vector<double> minimums,
                                         std::vector<double> maximums,
                                         std::size_t batches) {
  IntervalPattern pat(std::move(spec));
  if (minimums.size() != pat.spec_.features.size() ||
      maximums.size() != pat.spec_.features.size())
    throw DataError("interval state size does not match feature list");
  pat.min_ = std::move(minimums);
  pat.max_ = std::move(maximums);
  pat.batches_ = batches;
  return pat;
}

void CombinationPattern::Spec::validate(std::size_t column_count) const {
  if (modify.empty()) throw ConfigError("combination pattern modifies no features");
  check_indices(modify, column_count, "combination modify");
  check_indices(locked, column_count, "combination locked");
  for (std::size_t idx : locked)
    if (std::find(modify.begin(), modify.end(), idx) != modify.end())
      throw ConfigError("column " + std::to_string(idx) + " is both locked and modified");
  if (!(probability > 0.0 && probability <= 1.0))
    throw ConfigError("combination probability must be in (0, 1]");
  if (!(momentum >= 0.0 && momentum <= 1.0))
    throw ConfigError("combination momentum must be in [0, 1]");
}

CombinationPattern::CombinationPattern(Spec spec) : spec_(std::move(spec)) {
  columns_ = spec_.locked;
  columns_.insert(columns_.end(), spec_.modify.begin(), spec_.modify.end());
  std::sort(columns_.begin(), columns_.end());
  locked_at_.resize(columns_.size(), false);
  for (std::size_t i = 0; i < columns_.size(); ++i)
    locked_at_[i] = std::find(spec_.locked.begin(), spec_.locked.end(), columns_[i]) !=
                    spec_.locked.end();
}

void CombinationPattern::reindex() {
  by_locked_.clear();
  std::vector<double> locked_values;
  for (std::size_t c = 0; c < combos_.size(); ++c) {
    locked_values.clear();
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (locked_at_[i]) locked_values.push_back(combos_[c][i]);
    by_locked_[value_key(locked_values)].push_back(c);
  }
}

void CombinationPattern::fit(const Matrix& batch) {
  if (batch.empty()) throw DataError("combination fit on empty batch");
  for (std::size_t col : columns_)
    if (col >= batch.cols())
      throw DataError("batch has " + std::to_string(batch.cols()) +
                      " columns, combination pattern needs column " + std::to_string(col));

  // Unique tuples of this batch, first-seen order.
  std::vector<std::vector<double>> fresh;
  std::unordered_map<std::string, std::size_t> fresh_index;
  std::vector<double> tuple(columns_.size());
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    for (std::size_t i = 0; i < columns_.size(); ++i) tuple[i] = batch(r, columns_[i]);
    auto key = value_key(tuple);
    if (fresh_index.emplace(std::move(key), fresh.size()).second) fresh.push_back(tuple);
  }

  if (batches_ > 0 && spec_.mode == UpdateMode::Momentum) {
    // Keep the ceil(k * |old|) most recently seen tuples, drop the rest.
    auto keep = static_cast<std::size_t>(
        std::ceil(spec_.momentum * static_cast<double>(combos_.size())));
    if (keep < combos_.size())
      combos_.erase(combos_.begin(), combos_.end() - static_cast<std::ptrdiff_t>(keep));
  }

  // Append new tuples; a re-observed tuple moves to the end (most recent).
  for (auto& t : fresh) {
    auto it = std::find(combos_.begin(), combos_.end(), t);
    if (it != combos_.end()) combos_.erase(it);
    combos_.push_back(std::move(t));
  }

  ++batches_;
  reindex();
}

void CombinationPattern::perturb(std::span<double> row, RandomSource& rng) const {
  if (!fitted()) throw StateError("combination pattern is not fitted");
  for (std::size_t col : columns_)
    if (col >= row.size())
      throw DataError("row has " + std::to_string(row.size()) +
                      " columns, combination pattern needs column " + std::to_string(col));

  // One gate draw per row; the replacement covers all modified features.
  if (!rng.chance(spec_.probability)) return;

  std::vector<double> locked_values;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (locked_at_[i]) locked_values.push_back(row[columns_[i]]);

  auto it = by_locked_.find(value_key(locked_values));
  if (it == by_locked_.end() || it->second.empty()) return;

  const auto& combo = combos_[it->second[rng.pick(it->second.size())]];
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (!locked_at_[i]) row[columns_[i]] = combo[i];
}

CombinationPattern CombinationPattern::restore(
    Spec spec, std::vector<std::vector<double>> combinations, std::size_t batches) {
  CombinationPattern pat(std::move(spec));
  for (const auto& c : combinations)
    if (c.size() != pat.columns_.size())
      throw DataError("combination state tuple width does not match column list");
  pat.combos_ = std::move(combinations);
  pat.batches_ = batches;
  pat.reindex();
  return pat;
}

void BaseConfig::validate(const FeatureSchema& schema) const {
  for (const auto& spec : patterns)
    std::visit([&](const auto& s) { s.validate(schema.feature_count()); }, spec);
  ClassMask::all_except(schema, excluded_classes);  // checks the names resolve
}

PatternSequence::PatternSequence(std::span<const PatternSpec> specs) {
  patterns_.reserve(specs.size());
  for (const auto& spec : specs) {
    if (const auto* interval = std::get_if<IntervalPattern::Spec>(&spec))
      patterns_.emplace_back(IntervalPattern(*interval));
    else
      patterns_.emplace_back(CombinationPattern(std::get<CombinationPattern::Spec>(spec)));
  }
}

void PatternSequence::fit(const Matrix& batch) {
  // Every pattern adapts to the same original batch, never to another
  // pattern's perturbations.
  for (auto& pat : patterns_)
    std::visit([&](auto& p) { p.fit(batch); }, pat);
}

void PatternSequence::perturb(std::span<double> row, RandomSource& rng) const {
  for (const auto& pat : patterns_)
    std::visit([&](const auto& p) { p.perturb(row, rng); }, pat);
}

bool PatternSequence::fitted() const {
  for (const auto& pat : patterns_)
    if (!std::visit([](const auto& p) { return p.fitted(); }, pat)) return false;
  return true;
}

PatternSequence PatternSequence::restore(std::vector<FittedPattern> patterns) {
  PatternSequence seq;
  seq.patterns_ = std::move(patterns);
  return seq;
}

A2pmState::A2pmState(FeatureSchema schema, BaseConfig config)
    : schema_(std::move(schema)), config_(std::move(config)) {
  schema_.validate();
  config_.validate(schema_);
  mask_ = ClassMask::all_except(schema_, config_.excluded_classes);
}

const PatternSequence* A2pmState::sequence_for(int class_index) const {
  auto it = per_class_.find(class_index);
  return it == per_class_.end() ? nullptr : &it->second;
}

void A2pmState::fit(const Dataset& ds) {
  if (ds.schema != schema_) throw DataError("dataset schema does not match A2PM state");

  std::map<int, std::vector<std::size_t>> rows_by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) rows_by_class[ds.labels[i]].push_back(i);

  for (const auto& [cls, rows] : rows_by_class) {
    if (!mask_.perturbable(cls)) continue;
    Matrix batch(0, ds.values.cols());
    for (std::size_t r : rows) batch.push_row(ds.values.row(r));

    auto it = per_class_.find(cls);
    if (it == per_class_.end()) {
      // Novel class: instantiate its sequence from the base configuration.
      PatternSequence seq{std::span<const PatternSpec>(config_.patterns)};
      seq.fit(batch);
      per_class_.emplace(cls, std::move(seq));
    } else {
      it->second.fit(batch);
    }
  }
}

Matrix A2pmState::perturb(const Dataset& ds, const RngStream& rng) const {
  if (ds.schema != schema_) throw DataError("dataset schema does not match A2PM state");

  Matrix out = ds.values;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int cls = ds.labels[i];
    if (!mask_.perturbable(cls)) continue;  // excluded rows pass through untouched
    const PatternSequence* seq = sequence_for(cls);
    if (!seq) {
      const auto& name = schema_.class_names.at(static_cast<std::size_t>(cls));
      throw StateError("no fitted sequence for class '" + name + "'");
    }
    RngStream sub = rng.substream(i);
    seq->perturb(out.row(i), sub);
  }
  return out;
}

A2pmState A2pmState::restore(FeatureSchema schema, BaseConfig config,
                             std::map<int, PatternSequence> per_class) {
  A2pmState state(std::move(schema), std::move(config));
  state.per_class_ = std::move(per_class);
  return state;
}

}  // namespace a2pm
