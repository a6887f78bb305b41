#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace a2pm {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: out-of-range parameters, unresolved names, malformed
// config documents. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad data: malformed CSV, schema mismatches, invariant-breaking inputs.
// CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// Operation called on an object in the wrong state (e.g. perturbing an
// unfitted pattern).
class StateError : public Error {
 public:
  using Error::Error;
};

// External classifier failure: process death, protocol violation, timeout.
// CLI exit code 4.
class OracleError : public Error {
 public:
  using Error::Error;
};

// Attack aborted mid-run; carries the 1-based iteration that failed.
class AttackError : public Error {
 public:
  AttackError(std::size_t iteration, const std::string& msg)
      : Error("iteration " + std::to_string(iteration) + ": " + msg),
        iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace a2pm
