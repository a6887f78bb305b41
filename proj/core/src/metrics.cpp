#include "a2pm/metrics.hpp"

#include <algorithm>
#include <set>

#include "a2pm/error.hpp"

namespace a2pm {

namespace {

void check_lengths(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw DataError("label vectors differ in length: " + std::to_string(y_true.size()) +
                    " vs " + std::to_string(y_pred.size()));
  if (y_true.empty()) throw DataError("label vectors are empty");
}

}  // namespace

std::map<int, ConfusionCounts> confusion_counts(std::span<const int> y_true,
                                                std::span<const int> y_pred) {
  check_lengths(y_true, y_pred);
  std::map<int, ConfusionCounts> counts;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    counts[y_true[i]];
    counts[y_pred[i]];
  }
  const long n = static_cast<long>(y_true.size());
  for (auto& [cls, c] : counts) {
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool actual = y_true[i] == cls;
      const bool predicted = y_pred[i] == cls;
      if (actual && predicted)
        ++c.tp;
      else if (!actual && predicted)
        ++c.fp;
      else if (actual && !predicted)
        ++c.fn;
    }
    c.tn = n - c.tp - c.fp - c.fn;
  }
  return counts;
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred,
                std::span<const int> excluded) {
  check_lengths(y_true, y_pred);
  const std::set<int> dropped(excluded.begin(), excluded.end());
  long kept = 0;
  long correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (dropped.count(y_true[i])) continue;
    ++kept;
    if (y_true[i] == y_pred[i]) ++correct;
  }
  if (kept == 0) throw DataError("every sample belongs to an excluded class");
  return static_cast<double>(correct) / static_cast<double>(kept);
}

double macro_f1(std::span<const int> y_true, std::span<const int> y_pred) {
  const auto counts = confusion_counts(y_true, y_pred);
  double sum = 0.0;
  for (const auto& [cls, c] : counts) {
    const double p = (c.tp + c.fp) == 0 ? 0.0
                                        : static_cast<double>(c.tp) /
                                              static_cast<double>(c.tp + c.fp);
    const double r = (c.tp + c.fn) == 0 ? 0.0
                                        : static_cast<double>(c.tp) /
                                              static_cast<double>(c.tp + c.fn);
    sum += (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  return sum / static_cast<double>(counts.size());
}

MetricReport evaluate_predictions(std::span<const int> y_true,
                                  std::span<const int> y_pred,
                                  std::span<const int> excluded) {
  MetricReport report;
  report.sample_count = y_true.size();
  report.excluded_classes.assign(excluded.begin(), excluded.end());
  report.accuracy = accuracy(y_true, y_pred, excluded);
  report.macro_f1 = macro_f1(y_true, y_pred);
  for (const auto& [cls, c] : confusion_counts(y_true, y_pred)) {
    ClassMetrics m;
    m.class_index = cls;
    m.precision = (c.tp + c.fp) == 0 ? 0.0
                                     : static_cast<double>(c.tp) /
                                           static_cast<double>(c.tp + c.fp);
    m.recall = (c.tp + c.fn) == 0 ? 0.0
                                  : static_cast<double>(c.tp) /
                                        static_cast<double>(c.tp + c.fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    report.per_class.push_back(m);
  }
  return report;
}

double timing_rate(std::span<const GenerationTiming> iterations) {
  std::size_t examples = 0;
  std::chrono::nanoseconds elapsed{0};
  for (const auto& it : iterations) {
    examples += it.examples;
    elapsed += it.elapsed;
  }
  if (examples == 0) throw DataError("no examples generated, rate undefined");
  const auto floor = std::chrono::nanoseconds{1000};  // 1 microsecond
  elapsed = std::max(elapsed, floor);
  const double ms = std::chrono::duration<double, std::milli>(elapsed).count();
  return static_cast<double>(examples) / ms;
}

}  // namespace a2pm
