#pragma once

#include <string>
#include <vector>

#include "a2pm/patterns.hpp"
#include "a2pm/schema.hpp"

namespace a2pm {

// Realism checks on generated rows, comparing each adversarial row against
// its original under the fitted state of its class:
//
//   - interval membership: a changed value of an interval-pattern feature
//     must lie inside that pattern's [min, max] (integer features integral
//     inside the integral subinterval);
//   - combination membership: the tuple over a combination pattern's columns
//     must match a recorded combination or be unchanged, ignoring columns a
//     later pattern in the sequence may overwrite;
//   - immutability: features no pattern of the class modifies, and entire
//     rows of excluded classes, must be identical to the original;
//   - one-hot well-formedness and all other dataset invariants.
std::vector<Violation> realism_check(const Dataset& adversarial,
                                     const Dataset& original, const A2pmState& state);

// Violation counts grouped by rule, one line each, capped example listing.
std::string realism_summary(const std::vector<Violation>& violations,
                            std::size_t max_examples = 10);

}  // namespace a2pm
