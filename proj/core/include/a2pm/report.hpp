#pragma once

#include <string>

#include "a2pm/attack.hpp"
#include "a2pm/metrics.hpp"

namespace a2pm {

// Human-readable attack summary: per-iteration success counts, final metrics,
// generation rate.
std::string render_report_text(const AttackResult& result,
                               const MetricReport* final_metrics = nullptr);

// Machine-readable record with stable field names (documented in the README).
std::string report_to_json(const AttackResult& result,
                           const MetricReport* final_metrics = nullptr);

std::string metric_report_to_json(const MetricReport& report);
std::string render_metric_text(const MetricReport& report);

}  // namespace a2pm
