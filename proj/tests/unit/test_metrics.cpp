#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "a2pm/error.hpp"
#include "a2pm/metrics.hpp"
#include "a2pm/rng.hpp"

using namespace a2pm;

namespace {

// Independent reference: build the full KxK confusion matrix, then derive
// the metrics from it. Kept deliberately separate from the library path.
struct BruteForce {
  std::vector<std::vector<long>> matrix;  // matrix[true][pred]
  std::vector<int> classes;

  BruteForce(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    std::set<int> seen(y_true.begin(), y_true.end());
    seen.insert(y_pred.begin(), y_pred.end());
    classes.assign(seen.begin(), seen.end());
    matrix.assign(classes.size(), std::vector<long>(classes.size(), 0));
    for (std::size_t i = 0; i < y_true.size(); ++i)
      ++matrix[slot(y_true[i])][slot(y_pred[i])];
  }

  std::size_t slot(int cls) const {
    return static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), cls) - classes.begin());
  }

  double accuracy(const std::vector<int>& excluded) const {
    long kept = 0;
    long correct = 0;
    for (std::size_t t = 0; t < classes.size(); ++t) {
      if (std::find(excluded.begin(), excluded.end(), classes[t]) != excluded.end())
        continue;
      for (std::size_t p = 0; p < classes.size(); ++p) {
        kept += matrix[t][p];
        if (t == p) correct += matrix[t][p];
      }
    }
    return static_cast<double>(correct) / static_cast<double>(kept);
  }

  double macro_f1() const {
    double sum = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      long tp = matrix[c][c];
      long fp = 0;
      long fn = 0;
      for (std::size_t o = 0; o < classes.size(); ++o) {
        if (o == c) continue;
        fp += matrix[o][c];
        fn += matrix[c][o];
      }
      const double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
      const double r = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
      sum += p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
    return sum / static_cast<double>(classes.size());
  }
};

}  // namespace

TEST_CASE("accuracy counts correct predictions") {
  CHECK(accuracy(std::vector<int>{1, 1, 2}, std::vector<int>{1, 2, 2}) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(accuracy(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}) == 1.0);
}

TEST_CASE("accuracy drops samples whose true class is excluded") {
  const std::vector<int> excl{0};
  CHECK(accuracy(std::vector<int>{0, 1, 1}, std::vector<int>{0, 0, 1}, excl) == 0.5);
}

TEST_CASE("accuracy with nothing left to score is an error") {
  const std::vector<int> excl{0};
  CHECK_THROWS_AS(accuracy(std::vector<int>{0, 0}, std::vector<int>{0, 0}, excl),
                  DataError);
  CHECK_THROWS_AS(accuracy(std::vector<int>{0}, std::vector<int>{0, 1}), DataError);
}

TEST_CASE("macro F1 hand case equals 11/15") {
  CHECK(macro_f1(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 1, 1}) ==
        doctest::Approx(11.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("macro F1 endpoints") {
  CHECK(macro_f1(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}) == 1.0);
  CHECK(macro_f1(std::vector<int>{0, 1}, std::vector<int>{1, 0}) == 0.0);
}

TEST_CASE("classes predicted but never true still weigh the average down") {
  // class 2 appears only in predictions: zero F1 term, three-way average
  const double value = macro_f1(std::vector<int>{0, 0, 1}, std::vector<int>{0, 2, 1});
  const double expected = (2.0 / 3.0 + 1.0 + 0.0) / 3.0;
  CHECK(value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("metrics agree with the brute-force confusion-matrix oracle") {
  RngStream rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.pick(40);
    const int k = 1 + static_cast<int>(rng.pick(6));
    std::vector<int> y_true(n);
    std::vector<int> y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_true[i] = static_cast<int>(rng.pick(static_cast<std::size_t>(k)));
      y_pred[i] = static_cast<int>(rng.pick(static_cast<std::size_t>(k)));
    }

    const BruteForce oracle(y_true, y_pred);
    CHECK(std::abs(macro_f1(y_true, y_pred) - oracle.macro_f1()) <= 1e-12);
    CHECK(std::abs(accuracy(y_true, y_pred) - oracle.accuracy({})) <= 1e-12);

    // exclusion agreement when at least one sample survives
    const int excluded_class = y_true[0];
    const bool survivor = std::any_of(y_true.begin(), y_true.end(),
                                      [&](int c) { return c != excluded_class; });
    if (survivor) {
      const std::vector<int> excl{excluded_class};
      CHECK(std::abs(accuracy(y_true, y_pred, excl) - oracle.accuracy(excl)) <= 1e-12);
    }
  }
}

TEST_CASE("macro F1 is invariant under class relabeling") {
  RngStream rng(31415);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.pick(30);
    std::vector<int> y_true(n);
    std::vector<int> y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_true[i] = static_cast<int>(rng.pick(4));
      y_pred[i] = static_cast<int>(rng.pick(4));
    }
    std::vector<int> perm{0, 1, 2, 3};
    for (std::size_t i = 3; i > 0; --i) std::swap(perm[i], perm[rng.pick(i + 1)]);

    std::vector<int> t2(n);
    std::vector<int> p2(n);
    for (std::size_t i = 0; i < n; ++i) {
      t2[i] = perm[static_cast<std::size_t>(y_true[i])];
      p2[i] = perm[static_cast<std::size_t>(y_pred[i])];
    }
    CHECK(macro_f1(y_true, y_pred) == doctest::Approx(macro_f1(t2, p2)).epsilon(1e-12));
  }
}

TEST_CASE("accuracy with empty exclusion equals plain accuracy") {
  RngStream rng(161803);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.pick(30);
    std::vector<int> y_true(n);
    std::vector<int> y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_true[i] = static_cast<int>(rng.pick(3));
      y_pred[i] = static_cast<int>(rng.pick(3));
    }
    CHECK(accuracy(y_true, y_pred, std::vector<int>{}) == accuracy(y_true, y_pred));
  }
}

TEST_CASE("confusion counts always sum to n") {
  const std::vector<int> y_true{0, 1, 1, 2, 2, 2};
  const std::vector<int> y_pred{0, 2, 1, 2, 0, 2};
  for (const auto& [cls, c] : confusion_counts(y_true, y_pred))
    CHECK(c.tp + c.fp + c.fn + c.tn == 6);
}

TEST_CASE("timing rate pools examples over elapsed time") {
  using std::chrono::milliseconds;
  std::vector<GenerationTiming> iterations{{100, milliseconds(10)}};
  CHECK(timing_rate(iterations) == doctest::Approx(10.0));

  iterations = {{50, milliseconds(5)}, {10, milliseconds(5)}};
  CHECK(timing_rate(iterations) == doctest::Approx(6.0));
}

TEST_CASE("timing rate floors zero elapsed at one microsecond") {
  std::vector<GenerationTiming> iterations{{5, std::chrono::nanoseconds(0)}};
  CHECK(timing_rate(iterations) == doctest::Approx(5.0 / 0.001));
}

TEST_CASE("timing rate with zero examples is an error") {
  std::vector<GenerationTiming> iterations{{0, std::chrono::milliseconds(5)}};
  CHECK_THROWS_AS(timing_rate(iterations), DataError);
}

TEST_CASE("evaluate_predictions fills the whole report") {
  const std::vector<int> y_true{0, 0, 1, 1};
  const std::vector<int> y_pred{0, 1, 1, 1};
  const MetricReport report = evaluate_predictions(y_true, y_pred);
  CHECK(report.sample_count == 4);
  CHECK(report.accuracy == doctest::Approx(0.75));
  CHECK(report.macro_f1 == doctest::Approx(11.0 / 15.0));
  REQUIRE(report.per_class.size() == 2);
  CHECK(report.per_class[0].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(report.per_class[1].f1 == doctest::Approx(0.8));
}
