#include "a2pm/attack.hpp"

#include <chrono>

#include "a2pm/error.hpp"

namespace a2pm {

void AttackConfig::validate(const FeatureSchema& schema) const {
  if (mode == Mode::Targeted) {
    if (target_class < 0 || target_class >= static_cast<int>(schema.class_count()))
      throw ConfigError("target class index " + std::to_string(target_class) +
                        " not in schema");
  }
  if (patience == 0) throw ConfigError("patience must be positive");
  if (max_iterations > 0 && patience > max_iterations)
    throw ConfigError("patience " + std::to_string(patience) +
                      " exceeds max iterations " + std::to_string(max_iterations));
}

AttackResult run_attack(A2pmState& state, ModelOracle& oracle, const Dataset& ds,
                        const AttackConfig& cfg, const IterationObserver& on_iteration) {
  cfg.validate(state.schema());
  state.fit(ds);  // adapt to this data, creating sequences for novel classes

  const std::size_t n = ds.size();
  AttackResult result;
  result.adversarial = ds.values;
  result.success_mask.assign(n, false);
  if (n == 0) return result;

  const auto eligible = [&](std::size_t i) {
    if (!state.class_perturbable(ds.labels[i])) return false;
    if (cfg.mode == AttackConfig::Mode::Targeted && ds.labels[i] == cfg.target_class)
      return false;
    return true;
  };
  const auto succeeded = [&](std::size_t i, int predicted) {
    return cfg.mode == AttackConfig::Mode::Untargeted ? predicted != ds.labels[i]
                                                      : predicted == cfg.target_class;
  };

  Matrix working = ds.values;
  std::vector<int> last_pred(n, -1);
  std::size_t no_progress = 0;
  using clock = std::chrono::steady_clock;

  for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
      if (eligible(i) && !result.success_mask[i]) active.push_back(i);
    if (active.empty()) break;

    Dataset batch;
    batch.schema = ds.schema;
    batch.values = Matrix(0, working.cols());
    for (std::size_t i : active) {
      batch.values.push_row(working.row(i));
      batch.labels.push_back(ds.labels[i]);
    }

    const RngStream iter_rng(RngStream::mix(cfg.seed, iter));
    const auto gen_start = clock::now();
    Matrix candidates = state.perturb(batch, iter_rng);
    const auto gen_elapsed = clock::now() - gen_start;

    std::vector<int> predictions;
    try {
      predictions = oracle.predict(candidates);
    } catch (const Error& e) {
      throw AttackError(iter, e.what());
    }
    if (predictions.size() != active.size())
      throw AttackError(iter, "oracle returned " + std::to_string(predictions.size()) +
                                  " labels for " + std::to_string(active.size()) + " rows");

    IterationRecord record;
    record.timing.examples = active.size();
    record.timing.elapsed =
        std::chrono::duration_cast<std::chrono::nanoseconds>(gen_elapsed);

    for (std::size_t j = 0; j < active.size(); ++j) {
      const std::size_t i = active[j];
      // The candidate becomes the new working value either way: successes
      // freeze it, failures continue the walk from it next iteration.
      for (std::size_t col = 0; col < working.cols(); ++col)
        working(i, col) = candidates(j, col);
      last_pred[i] = predictions[j];
      if (succeeded(i, predictions[j])) {
        result.success_mask[i] = true;
        ++record.new_successes;
      }
    }

    if (cfg.record_metrics) {
      std::vector<int> y_true;
      std::vector<int> y_pred;
      for (std::size_t i = 0; i < n; ++i) {
        if (!eligible(i) || last_pred[i] < 0) continue;
        y_true.push_back(ds.labels[i]);
        y_pred.push_back(last_pred[i]);
      }
      if (!y_true.empty()) record.metrics = evaluate_predictions(y_true, y_pred);
    }

    no_progress = record.new_successes == 0 ? no_progress + 1 : 0;
    if (on_iteration) on_iteration(iter, record);
    result.per_iteration.push_back(std::move(record));
    result.iterations_run = iter;

    if (no_progress >= cfg.patience) break;
  }

  // Frozen rows keep their successful candidate; rows still active after a
  // patience stop (or that were never eligible) stay at their originals.
  for (std::size_t i = 0; i < n; ++i)
    if (result.success_mask[i])
      for (std::size_t col = 0; col < working.cols(); ++col)
        result.adversarial(i, col) = working(i, col);
  if (no_progress < cfg.patience)
    for (std::size_t i = 0; i < n; ++i)
      if (eligible(i) && !result.success_mask[i])
        for (std::size_t col = 0; col < working.cols(); ++col)
          result.adversarial(i, col) = working(i, col);

  if (!result.per_iteration.empty()) {
    std::vector<GenerationTiming> timings;
    for (const auto& rec : result.per_iteration) timings.push_back(rec.timing);
    result.timing_rate_per_ms = timing_rate(timings);
  }
  return result;
}

Dataset augment_training(const A2pmState& state, const Dataset& train,
                         const RngStream& rng) {
  if (train.schema != state.schema())
    throw DataError("training set schema does not match A2PM state");

  Dataset out;
  out.schema = train.schema;
  out.values = train.values;
  out.labels = train.labels;
  if (train.size() == 0) return out;

  const Matrix perturbed = state.perturb(train, rng);
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!state.class_perturbable(train.labels[i])) continue;
    out.values.push_row(perturbed.row(i));
    out.labels.push_back(train.labels[i]);
  }
  return out;
}

}  // namespace a2pm
