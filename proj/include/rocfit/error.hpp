#pragma once

#include <stdexcept>
#include <string>

namespace rocfit {

/// Bad input: malformed data, out-of-domain arguments, unmet preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rocfit
