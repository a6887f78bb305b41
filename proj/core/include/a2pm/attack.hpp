#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "a2pm/metrics.hpp"
#include "a2pm/oracle.hpp"
#include "a2pm/patterns.hpp"
#include "a2pm/rng.hpp"

namespace a2pm {

struct AttackConfig {
  enum class Mode { Untargeted, Targeted };

  Mode mode = Mode::Untargeted;
  int target_class = -1;  // set for Targeted
  std::size_t max_iterations = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  // When true, every iteration snapshots accuracy/macro-F1 over the
  // perturbable rows from cached predictions (no extra oracle queries).
  bool record_metrics = false;

  void validate(const FeatureSchema& schema) const;
};

struct IterationRecord {
  std::size_t new_successes = 0;
  GenerationTiming timing;  // candidates generated and generation-only time
  std::optional<MetricReport> metrics;
};

struct AttackResult {
  Matrix adversarial;              // one row per input row, original order
  std::vector<bool> success_mask;  // misclassified per the attack mode
  std::size_t iterations_run = 0;
  std::vector<IterationRecord> per_iteration;
  double timing_rate_per_ms = 0.0;  // examples per millisecond, oracle time excluded
};

using IterationObserver = std::function<void(std::size_t, const IterationRecord&)>;

// Iterative attack. Fits the state on `ds` first, then each iteration
// perturbs the still-active rows cumulatively from their current working
// values, queries the oracle once over the batch, and freezes rows that meet
// the success criterion. Stops when no rows remain active, `max_iterations`
// is reached, or `patience` consecutive iterations yield no new successes; in
// the patience case still-active rows revert to their originals.
AttackResult run_attack(A2pmState& state, ModelOracle& oracle, const Dataset& ds,
                        const AttackConfig& cfg,
                        const IterationObserver& on_iteration = {});

// Adversarial-training augmentation: the training set plus exactly one
// perturbed copy of every perturbable-class row, keeping its label. No
// oracle is involved. The state must already be fitted on `train`.
Dataset augment_training(const A2pmState& state, const Dataset& train,
                         const RngStream& rng);

}  // namespace a2pm
