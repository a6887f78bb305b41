#include <doctest.h>

#include <cmath>

#include <functional>

#include "a2pm/attack.hpp"
#include "a2pm/error.hpp"

using namespace a2pm;

namespace {

struct FnOracle final : ModelOracle {
  std::function<std::vector<int>(const Matrix&)> fn;
  std::size_t calls = 0;
  std::vector<std::size_t> batch_sizes;

  explicit FnOracle(std::function<std::vector<int>(const Matrix&)> f) : fn(std::move(f)) {}

  std::vector<int> predict(const Matrix& rows) override {
    ++calls;
    batch_sizes.push_back(rows.rows());
    return fn(rows);
  }
};

FnOracle constant_oracle(int label) {
  return FnOracle([label](const Matrix& rows) {
    return std::vector<int>(rows.rows(), label);
  });
}

FeatureSchema attack_schema(std::vector<std::string> classes) {
  FeatureSchema schema;
  schema.features = {{"a", FeatureKind::Continuous, ""},
                     {"b", FeatureKind::Continuous, ""},
                     {"c", FeatureKind::DiscreteInteger, ""}};
  schema.class_names = std::move(classes);
  return schema;
}

BaseConfig interval_config(std::vector<std::string> excluded) {
  IntervalPattern::Spec spec;
  spec.features = {0, 1, 2};
  spec.integer_features = {2};
  BaseConfig config;
  config.patterns = {spec};
  config.excluded_classes = std::move(excluded);
  return config;
}

Dataset mixed_dataset(std::size_t benign, std::size_t malicious) {
  Dataset ds;
  ds.schema = attack_schema({"Benign", "Mal"});
  ds.values = Matrix(0, 3);
  RngStream gen(17);
  for (std::size_t i = 0; i < benign; ++i) {
    ds.values.push_row(std::vector<double>{gen.uniform(0, 1), gen.uniform(0, 1),
                                           std::floor(gen.uniform(0, 5))});
    ds.labels.push_back(0);
  }
  for (std::size_t i = 0; i < malicious; ++i) {
    ds.values.push_row(std::vector<double>{gen.uniform(5, 9), gen.uniform(5, 9),
                                           std::floor(gen.uniform(10, 20))});
    ds.labels.push_back(1);
  }
  return ds;
}

AttackConfig quick_config(std::size_t max_iterations = 50, std::size_t patience = 5) {
  AttackConfig cfg;
  cfg.max_iterations = max_iterations;
  cfg.patience = patience;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("an oracle that misclassifies everything ends the attack in one iteration") {
  const Dataset ds = mixed_dataset(2, 5);
  A2pmState state(ds.schema, interval_config({"Benign"}));
  auto oracle = constant_oracle(0);  // everything looks benign

  const AttackResult result = run_attack(state, oracle, ds, quick_config());
  CHECK(result.iterations_run == 1);
  for (std::size_t i = 0; i < ds.size(); ++i)
    CHECK(result.success_mask[i] == (ds.labels[i] == 1));
  REQUIRE(result.per_iteration.size() == 1);
  CHECK(result.per_iteration[0].new_successes == 5);
  CHECK(result.per_iteration[0].timing.examples == 5);
}

TEST_CASE("an oracle that never misclassifies stops after exactly patience iterations") {
  const Dataset ds = mixed_dataset(2, 4);
  A2pmState state(ds.schema, interval_config({"Benign"}));
  auto oracle = constant_oracle(1);  // always the true malicious label

  const AttackResult result = run_attack(state, oracle, ds, quick_config(50, 5));
  CHECK(result.iterations_run == 5);
  CHECK(oracle.calls == 5);
  CHECK(result.adversarial == ds.values);  // active rows revert to originals
  for (bool s : result.success_mask) CHECK_FALSE(s);
}

TEST_CASE("zero max iterations leaves everything at the original") {
  const Dataset ds = mixed_dataset(1, 3);
  A2pmState state(ds.schema, interval_config({"Benign"}));
  auto oracle = constant_oracle(0);

  const AttackResult result = run_attack(state, oracle, ds, quick_config(0, 1));
  CHECK(result.iterations_run == 0);
  CHECK(oracle.calls == 0);
  CHECK(result.adversarial == ds.values);
  for (bool s : result.success_mask) CHECK_FALSE(s);
}

TEST_CASE("empty dataset gives an empty result") {
  Dataset ds;
  ds.schema = attack_schema({"Benign", "Mal"});
  ds.values = Matrix(0, 3);
  A2pmState state(ds.schema, interval_config({"Benign"}));
  auto oracle = constant_oracle(0);

  const AttackResult result = run_attack(state, oracle, ds, quick_config());
  CHECK(result.iterations_run == 0);
  CHECK(result.success_mask.empty());
  CHECK(result.adversarial.rows() == 0);
}

TEST_CASE("exactly one batched oracle query per iteration, sized to the active set") {
  const Dataset ds = mixed_dataset(3, 6);
  A2pmState state(ds.schema, interval_config({"Benign"}));

  // Flips the last row of each batch while more than one row is active, so
  // successes arrive one per iteration and one stubborn row never flips.
  FnOracle oracle([](const Matrix& rows) {
    std::vector<int> labels(rows.rows(), 1);
    if (rows.rows() > 1) labels[rows.rows() - 1] = 0;
    return labels;
  });

  const AttackResult result = run_attack(state, oracle, ds, quick_config(50, 3));
  // 6 active initially, one success per iteration until only one stubborn row
  // remains, then patience (3) empty iterations.
  CHECK(oracle.calls == result.iterations_run);
  REQUIRE(oracle.batch_sizes.size() == result.iterations_run);
  CHECK(oracle.batch_sizes[0] == 6);
  for (std::size_t i = 1; i < oracle.batch_sizes.size(); ++i)
    CHECK(oracle.batch_sizes[i] <= oracle.batch_sizes[i - 1]);

  // Monotonicity: cumulative successes never decrease.
  std::size_t running = 0;
  std::size_t final_count = 0;
  for (const auto& rec : result.per_iteration) running += rec.new_successes;
  for (bool s : result.success_mask) final_count += s ? 1 : 0;
  CHECK(running == final_count);
  CHECK(final_count == 5);
}

TEST_CASE("excluded rows come back bit-identical") {
  const Dataset ds = mixed_dataset(4, 4);
  A2pmState state(ds.schema, interval_config({"Benign"}));
  auto oracle = constant_oracle(0);

  const AttackResult result = run_attack(state, oracle, ds, quick_config());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] != 0) continue;
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(result.adversarial(i, c) == ds.values(i, c));
  }
}

TEST_CASE("identical seed and inputs reproduce the attack result exactly") {
  const Dataset ds = mixed_dataset(2, 6);

  const auto run_once = [&] {
    A2pmState state(ds.schema, interval_config({"Benign"}));
    // flip when the first feature drifted below its starting point
    FnOracle oracle([&](const Matrix& rows) {
      std::vector<int> labels;
      for (std::size_t i = 0; i < rows.rows(); ++i)
        labels.push_back(rows(i, 0) < 6.0 ? 0 : 1);
      return labels;
    });
    return run_attack(state, oracle, ds, quick_config(20, 5));
  };

  const AttackResult first = run_once();
  const AttackResult second = run_once();
  CHECK(first.adversarial == second.adversarial);
  CHECK(first.success_mask == second.success_mask);
  CHECK(first.iterations_run == second.iterations_run);
}

TEST_CASE("targeted mode never activates rows already labeled the target class") {
  Dataset ds;
  ds.schema = attack_schema({"Benign", "M1", "M2"});
  ds.values = Matrix::from_rows({{1, 1, 1}, {5, 5, 5}, {6, 6, 6}, {7, 7, 7}});
  ds.labels = {0, 1, 2, 2};

  BaseConfig config = interval_config({"Benign"});
  A2pmState state(ds.schema, config);
  auto oracle = constant_oracle(2);

  AttackConfig cfg = quick_config();
  cfg.mode = AttackConfig::Mode::Targeted;
  cfg.target_class = 2;

  const AttackResult result = run_attack(state, oracle, ds, cfg);
  CHECK(result.success_mask == std::vector<bool>{false, true, false, false});
  CHECK(oracle.batch_sizes == std::vector<std::size_t>{1});  // only the M1 row
  for (std::size_t i : {std::size_t{2}, std::size_t{3}})
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(result.adversarial(i, c) == ds.values(i, c));
}

TEST_CASE("oracle failures abort with the iteration index") {
  const Dataset ds = mixed_dataset(1, 3);
  A2pmState state(ds.schema, interval_config({"Benign"}));

  FnOracle oracle([calls = 0](const Matrix& rows) mutable {
    if (++calls == 2) throw OracleError("boom");
    return std::vector<int>(rows.rows(), 1);
  });

  try {
    run_attack(state, oracle, ds, quick_config());
    FAIL("expected AttackError");
  } catch (const AttackError& e) {
    CHECK(e.iteration() == 2);
  }
}

TEST_CASE("attack config validation") {
  const auto schema = attack_schema({"Benign", "Mal"});
  AttackConfig cfg;
  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(schema), ConfigError);
  cfg = {};
  cfg.patience = 51;
  cfg.max_iterations = 50;
  CHECK_THROWS_AS(cfg.validate(schema), ConfigError);
  cfg = {};
  cfg.mode = AttackConfig::Mode::Targeted;
  cfg.target_class = 9;
  CHECK_THROWS_AS(cfg.validate(schema), ConfigError);
}

TEST_CASE("metric snapshots cover perturbable rows without extra queries") {
  const Dataset ds = mixed_dataset(3, 5);
  A2pmState state(ds.schema, interval_config({"Benign"}));
  auto oracle = constant_oracle(0);

  AttackConfig cfg = quick_config();
  cfg.record_metrics = true;
  const AttackResult result = run_attack(state, oracle, ds, cfg);
  CHECK(oracle.calls == result.iterations_run);  // snapshots reuse cached labels
  REQUIRE(result.per_iteration.size() == 1);
  REQUIRE(result.per_iteration[0].metrics.has_value());
  CHECK(result.per_iteration[0].metrics->accuracy == 0.0);
  CHECK(result.per_iteration[0].metrics->sample_count == 5);
}

TEST_CASE("augmentation adds one copy per malicious row with the same label") {
  const Dataset train = mixed_dataset(2, 3);
  A2pmState state(train.schema, interval_config({"Benign"}));
  state.fit(train);

  const Dataset augmented = augment_training(state, train, RngStream(4));
  CHECK(augmented.size() == 8);  // 5 original + 3 copies
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(augmented.labels[i] == train.labels[i]);
  for (std::size_t i = train.size(); i < augmented.size(); ++i)
    CHECK(augmented.labels[i] == 1);
}

TEST_CASE("augmentation without malicious rows returns the input") {
  Dataset train = mixed_dataset(3, 0);
  A2pmState state(train.schema, interval_config({"Benign"}));
  state.fit(train);

  const Dataset augmented = augment_training(state, train, RngStream(4));
  CHECK(augmented.size() == 3);
  CHECK(augmented.values == train.values);
  CHECK(augmented.labels == train.labels);
}

TEST_CASE("augmentation rejects a schema mismatch") {
  const Dataset train = mixed_dataset(1, 2);
  A2pmState state(attack_schema({"Benign", "Other"}), interval_config({"Benign"}));
  CHECK_THROWS_AS(augment_training(state, train, RngStream(0)), DataError);
}
