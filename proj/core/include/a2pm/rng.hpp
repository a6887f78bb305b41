#pragma once

#include <cstdint>
#include <cstddef>

namespace a2pm {

// Source of randomness for perturbations. Every decision is derived from one
// uniform draw in [0, 1), so tests can script exact outcomes by queueing
// draws.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // Uniform double in [0, 1).
  virtual double uniform01() = 0;

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // True with probability p.
  bool chance(double p) { return uniform01() < p; }

  // Fair coin; true means "add".
  bool coin() { return uniform01() < 0.5; }

  // Uniform index in [0, n). n must be > 0.
  std::size_t pick(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
};

// Deterministic counter-based stream (splitmix64). Same seed and same call
// sequence give identical outputs on every platform. Substreams are derived
// from the seed alone, never from consumed state, so per-row substreams are
// reproducible regardless of processing order.
class RngStream final : public RandomSource {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() override {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Child stream for the given index; independent of this stream's position.
  RngStream substream(std::uint64_t index) const {
    return RngStream(mix(seed_, index));
  }

  // Stateless mixing of two words into a fresh seed.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace a2pm
