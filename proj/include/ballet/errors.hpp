#pragma once

#include <stdexcept>
#include <string>

namespace ballet {

/// Bad arguments: dimension mismatches, out-of-domain parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization failed even after the largest allowed jitter.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double final_jitter)
      : std::runtime_error(what), final_jitter_(final_jitter) {}

  double final_jitter() const noexcept { return final_jitter_; }

 private:
  double final_jitter_;
};

/// No eligible candidates remain in the pool.
class PoolExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ballet
