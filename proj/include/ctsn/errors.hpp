#pragma once

#include <stdexcept>
#include <string>

namespace ctsn {

// Shapes of two operands (or of an operand and its expected layout) disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition on a scalar argument or history length does not hold.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An object is used in a state that does not permit the call (incomplete
// cache, double write, missing record).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A NaN or Inf showed up where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctsn
