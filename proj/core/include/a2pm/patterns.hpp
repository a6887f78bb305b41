#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "a2pm/matrix.hpp"
#include "a2pm/rng.hpp"
#include "a2pm/schema.hpp"

namespace a2pm {

struct RatioRange {
  double lo = 0.1;
  double hi = 0.3;

  bool operator==(const RatioRange&) const = default;
};

// Perturbs uncorrelated numerical features within per-feature valid intervals.
// The interval is the min/max of the first fitted batch; later batches move it
// with momentum k: new_min = old_min * k + batch_min * (1 - k), and likewise
// for the maximum. A perturbation scales the interval width by a ratio drawn
// from `ratio`, is randomly added or subtracted (forced up at the minimum,
// forced down at the maximum), and the result is capped at the interval.
class IntervalPattern {
 public:
  struct Spec {
    std::vector<std::size_t> features;
    std::vector<std::size_t> integer_features;  // subset of `features`
    double probability = 1.0;                   // per-feature gate, in (0, 1]
    double momentum = 1.0;                      // 1 keeps the first-batch interval static
    RatioRange ratio;

    void validate(std::size_t column_count) const;

    bool operator==(const Spec&) const = default;
  };

  explicit IntervalPattern(Spec spec);

  void fit(const Matrix& batch);
  void perturb(std::span<double> row, RandomSource& rng) const;

  bool fitted() const { return batches_ > 0; }
  std::size_t fitted_batches() const { return batches_; }
  const Spec& spec() const { return spec_; }

  // Fitted interval of the i-th configured feature (spec order).
  double minimum(std::size_t i) const { return min_[i]; }
  double maximum(std::size_t i) const { return max_[i]; }

  static IntervalPattern restore(Spec spec, std::vector<double> minimums,
                                 std::vector<double> maximums, std::size_t batches);

  bool operator==(const IntervalPattern&) const = default;

 private:
  Spec spec_;
  std::vector<bool> integer_;  // aligned with spec_.features
  std::vector<double> min_;
  std::vector<double> max_;
  std::size_t batches_ = 0;
};

// Perturbs correlated features by replacing them with a recorded valid
// combination. Locked features select admissible combinations but are never
// written. Combinations are tuples over locked + modified columns in column
// order, kept most-recent-last.
class CombinationPattern {
 public:
  enum class UpdateMode { Merge, Momentum };

  struct Spec {
    std::vector<std::size_t> modify;
    std::vector<std::size_t> locked;  // disjoint from `modify`
    double probability = 1.0;         // per-row gate, in (0, 1]
    double momentum = 1.0;            // Momentum mode: fraction of old tuples kept
    UpdateMode mode = UpdateMode::Merge;

    void validate(std::size_t column_count) const;

    bool operator==(const Spec&) const = default;
  };

  explicit CombinationPattern(Spec spec);

  void fit(const Matrix& batch);
  void perturb(std::span<double> row, RandomSource& rng) const;

  bool fitted() const { return batches_ > 0; }
  std::size_t fitted_batches() const { return batches_; }
  const Spec& spec() const { return spec_; }

  // Locked + modified column indices, ascending; tuple component order.
  const std::vector<std::size_t>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& combinations() const { return combos_; }

  static CombinationPattern restore(Spec spec,
                                    std::vector<std::vector<double>> combinations,
                                    std::size_t batches);

  bool operator==(const CombinationPattern& other) const {
    return spec_ == other.spec_ && combos_ == other.combos_ && batches_ == other.batches_;
  }

 private:
  void reindex();

  Spec spec_;
  std::vector<std::size_t> columns_;  // sorted locked ∪ modify
  std::vector<bool> locked_at_;       // per tuple position
  std::vector<std::vector<double>> combos_;
  // Locked-value key -> combo positions, rebuilt after every fit.
  std::unordered_map<std::string, std::vector<std::size_t>> by_locked_;
  std::size_t batches_ = 0;
};

using PatternSpec = std::variant<IntervalPattern::Spec, CombinationPattern::Spec>;
using FittedPattern = std::variant<IntervalPattern, CombinationPattern>;

// Unfitted description of a pattern sequence plus the classes it must never
// touch. One base configuration serves every class, including classes that
// appear only in later batches.
struct BaseConfig {
  std::vector<PatternSpec> patterns;
  std::vector<std::string> excluded_classes;

  void validate(const FeatureSchema& schema) const;
};

// Ordered fitted patterns instantiated from a BaseConfig. All patterns fit on
// the same original batch; perturbation applies them in order, each receiving
// the previous pattern's output.
class PatternSequence {
 public:
  PatternSequence() = default;
  explicit PatternSequence(std::span<const PatternSpec> specs);

  void fit(const Matrix& batch);
  void perturb(std::span<double> row, RandomSource& rng) const;

  bool fitted() const;
  std::size_t size() const { return patterns_.size(); }
  const std::vector<FittedPattern>& patterns() const { return patterns_; }

  static PatternSequence restore(std::vector<FittedPattern> patterns);

 private:
  std::vector<FittedPattern> patterns_;
};

// Per-class pattern sequences sharing one base configuration. Fitting routes
// each class's rows to its own sequence, creating sequences for novel classes
// on the fly; excluded classes are ignored and never perturbed.
class A2pmState {
 public:
  A2pmState(FeatureSchema schema, BaseConfig config);

  void fit(const Dataset& ds);
  Matrix perturb(const Dataset& ds, const RngStream& rng) const;

  bool class_perturbable(int class_index) const { return mask_.perturbable(class_index); }
  const PatternSequence* sequence_for(int class_index) const;

  const FeatureSchema& schema() const { return schema_; }
  const BaseConfig& config() const { return config_; }
  const std::map<int, PatternSequence>& per_class() const { return per_class_; }

  static A2pmState restore(FeatureSchema schema, BaseConfig config,
                           std::map<int, PatternSequence> per_class);

 private:
  FeatureSchema schema_;
  BaseConfig config_;
  ClassMask mask_;
  std::map<int, PatternSequence> per_class_;
};

}  // namespace a2pm
