#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "a2pm/patterns.hpp"
#include "a2pm/rng.hpp"
#include "a2pm/schema.hpp"

using namespace a2pm;

namespace {

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  RngStream gen(seed);
  Matrix batch(0, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(cols);
    for (auto& v : row) v = std::floor(gen.uniform(0, 1000));
    batch.push_row(row);
  }
  return batch;
}

// 60 numeric + 4 one-hot blocks of 5, the enterprise-scenario scale.
FeatureSchema enterprise_schema() {
  FeatureSchema schema;
  for (int i = 0; i < 60; ++i)
    schema.features.push_back({"n" + std::to_string(i),
                               i < 10 ? FeatureKind::DiscreteInteger
                                      : FeatureKind::Continuous,
                               ""});
  for (const char* block : {"port", "protocol", "service", "flags"})
    for (int v = 0; v < 5; ++v)
      schema.features.push_back({std::string(block) + "=" + std::to_string(v),
                                 FeatureKind::CategoricalEncoded, block});
  schema.class_names = {"Benign", "Mal"};
  return schema;
}

BaseConfig enterprise_config() {
  IntervalPattern::Spec interval;
  for (std::size_t i = 0; i < 60; ++i) interval.features.push_back(i);
  for (std::size_t i = 0; i < 10; ++i) interval.integer_features.push_back(i);
  interval.probability = 0.6;

  CombinationPattern::Spec combo;
  for (std::size_t i = 70; i < 80; ++i) combo.modify.push_back(i);
  for (std::size_t i = 60; i < 70; ++i) combo.locked.push_back(i);
  combo.probability = 0.4;

  BaseConfig config;
  config.patterns = {PatternSpec{interval}, PatternSpec{combo}};
  config.excluded_classes = {"Benign"};
  return config;
}

Dataset enterprise_dataset(std::size_t rows) {
  Dataset ds;
  ds.schema = enterprise_schema();
  ds.values = Matrix(0, 80);
  RngStream gen(5);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(80, 0.0);
    for (int i = 0; i < 10; ++i) row[i] = std::floor(gen.uniform(0, 1000));
    for (int i = 10; i < 60; ++i) row[i] = gen.uniform(0, 1e6);
    for (int b = 0; b < 4; ++b) row[60 + 5 * b + gen.pick(5)] = 1.0;
    ds.values.push_row(row);
    ds.labels.push_back(1);
  }
  return ds;
}

void IntervalPerturb(benchmark::State& state) {
  const auto cols = static_cast<std::size_t>(state.range(0));
  IntervalPattern::Spec spec;
  for (std::size_t i = 0; i < cols; ++i) spec.features.push_back(i);
  spec.probability = 0.6;
  IntervalPattern pat(spec);
  pat.fit(random_batch(256, cols, 1));

  RngStream rng(2);
  std::vector<double> row(cols, 500.0);
  for (auto _ : state) {
    pat.perturb(row, rng);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(IntervalPerturb)->Arg(8)->Arg(60)->Arg(256);

void CombinationPerturb(benchmark::State& state) {
  const auto distinct = static_cast<std::size_t>(state.range(0));
  CombinationPattern::Spec spec;
  spec.modify = {2, 3};
  spec.locked = {0, 1};
  CombinationPattern pat(spec);

  RngStream gen(3);
  Matrix batch(0, 4);
  for (std::size_t r = 0; r < distinct; ++r)
    batch.push_row(std::vector<double>{double(gen.pick(10)), double(gen.pick(10)),
                                       double(gen.pick(50)), double(gen.pick(50))});
  pat.fit(batch);

  RngStream rng(4);
  std::vector<double> row{1.0, 2.0, 0.0, 0.0};
  for (auto _ : state) {
    row[0] = double(rng.pick(10));
    row[1] = double(rng.pick(10));
    pat.perturb(row, rng);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(CombinationPerturb)->Arg(10)->Arg(100)->Arg(1000);

void EnterpriseSequencePerturb(benchmark::State& state) {
  const BaseConfig config = enterprise_config();
  PatternSequence seq{std::span<const PatternSpec>(config.patterns)};
  const Dataset ds = enterprise_dataset(512);
  seq.fit(ds.values);

  RngStream rng(6);
  std::vector<double> row(ds.values.row(0).begin(), ds.values.row(0).end());
  for (auto _ : state) {
    seq.perturb(row, rng);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(EnterpriseSequencePerturb);

void A2pmPerturbBatch(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const Dataset ds = enterprise_dataset(rows);
  A2pmState a2pm(ds.schema, enterprise_config());
  a2pm.fit(ds);

  const RngStream rng(7);
  for (auto _ : state) {
    Matrix out = a2pm.perturb(ds, rng);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(A2pmPerturbBatch)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
