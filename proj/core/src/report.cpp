#include "a2pm/report.hpp"

#include <sstream>

#include <json.hpp>

namespace a2pm {

namespace {

using nlohmann::json;

json metric_report_doc(const MetricReport& report) {
  json per_class = json::array();
  for (const auto& m : report.per_class)
    per_class.push_back(json{{"class", m.class_index},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1}});
  return json{{"accuracy", report.accuracy},
              {"macro_f1", report.macro_f1},
              {"per_class", std::move(per_class)},
              {"excluded_classes", report.excluded_classes},
              {"sample_count", report.sample_count}};
}

}  // namespace

std::string metric_report_to_json(const MetricReport& report) {
  return metric_report_doc(report).dump(2);
}

std::string render_metric_text(const MetricReport& report) {
  std::ostringstream out;
  out << "samples:  " << report.sample_count << '\n';
  out << "accuracy: " << report.accuracy << '\n';
  out << "macro-F1: " << report.macro_f1 << '\n';
  for (const auto& m : report.per_class)
    out << "  class " << m.class_index << ": precision=" << m.precision
        << " recall=" << m.recall << " f1=" << m.f1 << '\n';
  return out.str();
}

std::string report_to_json(const AttackResult& result,
                           const MetricReport* final_metrics) {
  json iterations = json::array();
  std::size_t total_successes = 0;
  for (const auto& rec : result.per_iteration) {
    total_successes += rec.new_successes;
    json entry{{"new_successes", rec.new_successes},
               {"examples_generated", rec.timing.examples},
               {"generation_ms",
                std::chrono::duration<double, std::milli>(rec.timing.elapsed).count()}};
    if (rec.metrics) entry["metrics"] = metric_report_doc(*rec.metrics);
    iterations.push_back(std::move(entry));
  }

  json doc{{"iterations_run", result.iterations_run},
           {"rows", result.success_mask.size()},
           {"successes", total_successes},
           {"timing_rate_per_ms", result.timing_rate_per_ms},
           {"per_iteration", std::move(iterations)}};
  if (final_metrics) doc["final_metrics"] = metric_report_doc(*final_metrics);
  return doc.dump(2);
}

std::string render_report_text(const AttackResult& result,
                               const MetricReport* final_metrics) {
  std::ostringstream out;
  std::size_t total = 0;
  out << "iterations run: " << result.iterations_run << '\n';
  for (std::size_t i = 0; i < result.per_iteration.size(); ++i) {
    const auto& rec = result.per_iteration[i];
    total += rec.new_successes;
    out << "  iter " << (i + 1) << ": generated " << rec.timing.examples
        << ", new successes " << rec.new_successes << ", total " << total << '\n';
  }
  out << "successful rows: " << total << " of " << result.success_mask.size() << '\n';
  if (!result.per_iteration.empty())
    out << "generation rate: " << result.timing_rate_per_ms << " examples/ms\n";
  if (final_metrics) out << render_metric_text(*final_metrics);
  return out.str();
}

}  // namespace a2pm
