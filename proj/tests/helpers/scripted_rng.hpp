#pragma once

#include <deque>
#include <initializer_list>
#include <stdexcept>

#include "a2pm/rng.hpp"

namespace a2pm::testing {

// Replays a fixed queue of uniform01 draws so perturbation outcomes can be
// pinned exactly. Throws if the code under test draws more than scripted.
class ScriptedSource final : public RandomSource {
 public:
  ScriptedSource(std::initializer_list<double> draws) : draws_(draws) {}

  double uniform01() override {
    if (draws_.empty()) throw std::logic_error("scripted RNG ran out of draws");
    double value = draws_.front();
    draws_.pop_front();
    return value;
  }

  std::size_t remaining() const { return draws_.size(); }

 private:
  std::deque<double> draws_;
};

}  // namespace a2pm::testing
