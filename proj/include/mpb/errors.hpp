#pragma once

#include <stdexcept>
#include <string>

namespace mpb {

// Numerically pathological input: non-convergence, a matrix that is not
// positive definite at tolerance, a pole hit by an evaluator.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpb
