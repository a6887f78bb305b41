#pragma once

#include <chrono>
#include <map>
#include <span>
#include <vector>

namespace a2pm {

// One-vs-rest confusion counts for a single class.
struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

struct ClassMetrics {
  int class_index = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::vector<int> excluded_classes;
  std::size_t sample_count = 0;
};

// One-vs-rest counts for every class present in either vector.
std::map<int, ConfusionCounts> confusion_counts(std::span<const int> y_true,
                                                std::span<const int> y_pred);

// Proportion of correctly classified samples after dropping samples whose
// TRUE class is excluded. Throws DataError if the vectors mismatch or if
// exclusion leaves nothing to score.
double accuracy(std::span<const int> y_true, std::span<const int> y_pred,
                std::span<const int> excluded = {});

// Unweighted mean of per-class F1 over every class present in either vector.
// Zero-division (no predicted or no actual samples of a class) yields 0.
double macro_f1(std::span<const int> y_true, std::span<const int> y_pred);

// accuracy + macro-F1 + per-class precision/recall/F1 in one report.
MetricReport evaluate_predictions(std::span<const int> y_true,
                                  std::span<const int> y_pred,
                                  std::span<const int> excluded = {});

// Per-iteration generation cost, oracle time excluded.
struct GenerationTiming {
  std::size_t examples = 0;
  std::chrono::nanoseconds elapsed{0};
};

// Pooled examples-per-millisecond over all iterations. Elapsed time is
// floored at 1 microsecond to stay defined at clock resolution. Throws
// DataError when no examples were generated.
double timing_rate(std::span<const GenerationTiming> iterations);

}  // namespace a2pm
