#pragma once

#include <stdexcept>
#include <string>

namespace temperflow {

// Invalid probability-model input: non-PD covariance, dimension mismatch,
// interpolant outside its validity range, missing Gaussian descriptors.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Runtime numerical failure: NaN in an ODE right-hand side, PD loss that
// survives step halving, degenerate importance weights.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad experiment configuration (unknown key, missing block, bad value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace temperflow
