#include <doctest.h>

#include <vector>

#include "a2pm/rng.hpp"

using namespace a2pm;

TEST_CASE("same seed and call sequence reproduce the stream") {
  RngStream a(123);
  RngStream b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) and is not constant") {
  RngStream rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.1);
  CHECK(hi > 0.9);
}

TEST_CASE("substreams depend on the seed, not on consumed state") {
  RngStream a(99);
  RngStream b(99);
  (void)a.uniform01();  // advance one stream only
  CHECK(a.substream(5).next_u64() == b.substream(5).next_u64());
  CHECK(a.substream(5).next_u64() != a.substream(6).next_u64());
}

TEST_CASE("pick covers the whole range") {
  RngStream rng(1);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[rng.pick(5)];
  for (int h : hits) CHECK(h > 500);
}

TEST_CASE("chance respects the endpoints") {
  RngStream rng(2);
  for (int i = 0; i < 100; ++i) CHECK(rng.chance(1.0));
  int fired = 0;
  for (int i = 0; i < 10000; ++i) fired += rng.chance(0.25) ? 1 : 0;
  CHECK(fired > 2000);
  CHECK(fired < 3000);
}
