#pragma once

#include <stdexcept>
#include <string>

namespace radonkit {

// Invalid shapes, parameters, or malformed input files. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure at runtime (divergence, NaN, loss of positive
// definiteness, half-precision overflow). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, long iteration)
      : NumericalError(what), iteration(iteration) {}
  long iteration;
};

class NotPositiveDefiniteError : public NumericalError {
 public:
  NotPositiveDefiniteError(const std::string& what, long iteration)
      : NumericalError(what), iteration(iteration) {}
  long iteration;
};

class HalfOverflowError : public NumericalError {
 public:
  HalfOverflowError(const std::string& what, long index)
      : NumericalError(what), index(index) {}
  long index;
};

}  // namespace radonkit
