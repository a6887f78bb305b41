#include <doctest.h>

#include <cstdlib>
#include <string>

#include "a2pm/error.hpp"
#include "a2pm/oracle.hpp"
#include "a2pm/rng.hpp"

using namespace a2pm;

namespace {

FeatureSchema xy_schema(std::vector<std::string> classes) {
  FeatureSchema schema;
  schema.features = {{"x", FeatureKind::Continuous, ""},
                     {"y", FeatureKind::Continuous, ""}};
  schema.class_names = std::move(classes);
  return schema;
}

Dataset xy_dataset(const std::vector<std::pair<std::vector<double>, int>>& rows,
                   std::vector<std::string> classes) {
  Dataset ds;
  ds.schema = xy_schema(std::move(classes));
  ds.values = Matrix(0, 2);
  for (const auto& [values, label] : rows) {
    ds.values.push_row(values);
    ds.labels.push_back(label);
  }
  return ds;
}

std::string server_command(const std::string& mode) {
  const char* path = std::getenv("A2PM_ORACLE_SERVER");
  REQUIRE_MESSAGE(path != nullptr, "A2PM_ORACLE_SERVER must point at the helper");
  return std::string(path) + " " + mode;
}

}  // namespace

TEST_CASE("centroids are per-class means") {
  const auto ds = xy_dataset({{{0.0, 0.0}, 0}, {{2.0, 2.0}, 0}, {{5.0, 5.0}, 1}},
                             {"a", "b"});
  const auto model = NearestCentroidModel::fit(ds);
  CHECK(model.centroids()(0, 0) == 1.0);
  CHECK(model.centroids()(0, 1) == 1.0);
  CHECK(model.centroids()(1, 0) == 5.0);

  const auto single = xy_dataset({{{3.0, 4.0}, 0}, {{7.0, 1.0}, 1}}, {"a", "b"});
  const auto points = NearestCentroidModel::fit(single);
  CHECK(points.centroids()(0, 0) == 3.0);
  CHECK(points.centroids()(1, 1) == 1.0);
}

TEST_CASE("a class without training rows fails the fit") {
  const auto ds = xy_dataset({{{0.0, 0.0}, 0}}, {"a", "b"});
  CHECK_THROWS_AS(NearestCentroidModel::fit(ds), DataError);
}

TEST_CASE("prediction picks the nearest centroid, ties to the lower index") {
  auto model = NearestCentroidModel::fit(
      xy_dataset({{{0.0, 0.0}, 0}, {{1.0, 1.0}, 1}}, {"a", "b"}));

  CHECK(model.predict_row(std::vector<double>{0.0, 0.0}) == 0);   // on a centroid
  CHECK(model.predict_row(std::vector<double>{0.5, 0.5}) == 0);   // equidistant
  CHECK(model.predict_row(std::vector<double>{0.9, 0.9}) == 1);

  const auto labels = model.predict(Matrix::from_rows({{0.9, 0.9}, {0.0, 0.1}}));
  CHECK(labels == std::vector<int>{1, 0});
}

TEST_CASE("prediction rejects a dimension mismatch") {
  auto model = NearestCentroidModel::fit(
      xy_dataset({{{0.0, 0.0}, 0}, {{1.0, 1.0}, 1}}, {"a", "b"}));
  CHECK_THROWS_AS(model.predict_row(std::vector<double>{1.0}), DataError);
}

TEST_CASE("centroid prediction is permutation-equivariant over rows") {
  auto model = NearestCentroidModel::fit(
      xy_dataset({{{0.0, 0.0}, 0}, {{4.0, 4.0}, 1}}, {"a", "b"}));

  RngStream rng(8);
  Matrix rows(0, 2);
  for (int i = 0; i < 30; ++i)
    rows.push_row(std::vector<double>{rng.uniform(-1, 5), rng.uniform(-1, 5)});
  const auto forward = model.predict(rows);

  Matrix reversed(0, 2);
  for (std::size_t i = rows.rows(); i-- > 0;) reversed.push_row(rows.row(i));
  const auto backward = model.predict(reversed);

  for (std::size_t i = 0; i < rows.rows(); ++i)
    CHECK(forward[i] == backward[rows.rows() - 1 - i]);
}

TEST_CASE("external oracle round-trips labels over the line protocol") {
  ExternalOracle oracle(server_command("zero"));
  const auto labels = oracle.predict(Matrix::from_rows({{1.5, -2.0}, {0.0, 3.25}}));
  CHECK(labels == std::vector<int>{0, 0});
  oracle.shutdown();
}

TEST_CASE("external oracle sees full-precision values") {
  ExternalOracle oracle(server_command("flip"));
  // 'flip' answers 1 - round(first value); exercising several batches also
  // checks that one process serves repeated requests.
  CHECK(oracle.predict(Matrix::from_rows({{0.0, 9.9}})) == std::vector<int>{1});
  CHECK(oracle.predict(Matrix::from_rows({{1.0, 0.1}, {0.0, 0.2}})) ==
        std::vector<int>{0, 1});
  oracle.shutdown();
}

TEST_CASE("wrong label count is a protocol error") {
  ExternalOracle oracle(server_command("badcount"));
  CHECK_THROWS_AS(oracle.predict(Matrix::from_rows({{1.0}, {2.0}})), OracleError);
}

TEST_CASE("a child closing the stream mid-reply is an oracle error") {
  ExternalOracle oracle(server_command("die"));
  CHECK_THROWS_AS(oracle.predict(Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}})),
                  OracleError);
}

TEST_CASE("malformed reply header is an oracle error") {
  ExternalOracle oracle(server_command("garbage"));
  CHECK_THROWS_AS(oracle.predict(Matrix::from_rows({{1.0}})), OracleError);
}

TEST_CASE("slow replies hit the configured timeout") {
  ExternalOracle::Options options;
  options.timeout = std::chrono::milliseconds(200);
  ExternalOracle oracle(server_command("slow"), options);
  CHECK_THROWS_AS(oracle.predict(Matrix::from_rows({{1.0}})), OracleError);
}

TEST_CASE("labels outside the schema class count are rejected") {
  ExternalOracle::Options options;
  options.class_count = 1;  // helper 'flip' answers 1 for first value 0
  ExternalOracle oracle(server_command("flip"), options);
  CHECK_THROWS_AS(oracle.predict(Matrix::from_rows({{0.0}})), OracleError);
}

TEST_CASE("batches above the chunk limit split into multiple requests") {
  const std::size_t n = ExternalOracle::kMaxRowsPerRequest + 100;
  Matrix rows(n, 2, 0.0);
  for (std::size_t i = 0; i < n; ++i) rows(i, 0) = i % 2 ? 1.0 : 0.0;

  ExternalOracle oracle(server_command("flip"));
  const auto labels = oracle.predict(rows);
  REQUIRE(labels.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(labels[i] == (i % 2 ? 0 : 1));
  oracle.shutdown();
}
