#pragma once

#include <stdexcept>
#include <string>

namespace fdpo {

// Bad input: malformed instance, unknown id, violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed: no bracket, NaN, non-finite everywhere.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdpo
