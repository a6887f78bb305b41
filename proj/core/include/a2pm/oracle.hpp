#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "a2pm/matrix.hpp"
#include "a2pm/schema.hpp"

namespace a2pm {

// Batch label predictor. Implementations must return exactly one class index
// per input row, in row order.
class ModelOracle {
 public:
  virtual ~ModelOracle() = default;
  virtual std::vector<int> predict(const Matrix& rows) = 0;
};

// Baseline classifier: each class is its training mean, prediction is the
// nearest centroid by Euclidean distance, ties to the lowest class index.
// The decision boundary is analytically known, which makes it a good test bed.
class NearestCentroidModel final : public ModelOracle {
 public:
  // Requires at least one training row per schema class.
  static NearestCentroidModel fit(const Dataset& train);

  std::vector<int> predict(const Matrix& rows) override;
  int predict_row(std::span<const double> row) const;

  const Matrix& centroids() const { return centroids_; }

 private:
  NearestCentroidModel() = default;
  Matrix centroids_;  // one row per class
};

// Adapter for an external classifier process speaking a line protocol over
// stdin/stdout:
//
//   request:  "PREDICT <n> <d>\n" + n lines of d comma-separated values
//   response: "LABELS <n>\n" + n lines of one integer class index each
//   shutdown: "QUIT\n", child exits 0
//
// Numbers carry full round-trip precision. Batches above 65,536 rows are
// split into multiple requests transparently; one request is in flight at a
// time. Callers must serialize access.
class ExternalOracle final : public ModelOracle {
 public:
  struct Options {
    std::chrono::milliseconds timeout{30000};
    // When > 0, replies with labels outside [0, class_count) are rejected.
    int class_count = 0;
  };

  // Launches `command` through /bin/sh. Throws OracleError on spawn failure.
  explicit ExternalOracle(std::string command);
  ExternalOracle(std::string command, Options options);
  ~ExternalOracle() override;

  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  std::vector<int> predict(const Matrix& rows) override;

  // Sends QUIT and waits; throws OracleError if the child does not exit 0.
  void shutdown();

  static constexpr std::size_t kMaxRowsPerRequest = 65536;

 private:
  std::vector<int> request(const Matrix& rows, std::size_t begin, std::size_t count);
  void write_all(const std::string& data);
  std::string read_line();
  void kill_child();

  std::string command_;
  Options options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool shut_down_ = false;
  bool broken_ = false;  // protocol failed; skip the graceful QUIT
};

}  // namespace a2pm
