#pragma once

#include <stdexcept>
#include <string>

namespace npca {

// Precondition violation on a model input (out-of-range probability, singular
// parameter combination, ...).
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solver ran out of its iteration budget.
class solver_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad run configuration (file contents or assembled SimConfig).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace npca
