#ifndef MLZSR_ERRORS_HPP_
#define MLZSR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mlzsr {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand dimensions do not match what the operation requires.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid or inconsistent configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// NaN/Inf encountered where finite values are required.
struct NumericError : Error {
  using Error::Error;
};

// Malformed input files; message carries line/offset context.
struct ParseError : Error {
  using Error::Error;
};

// Bad data passed to an operation (empty sets, out-of-range k, ...).
struct DataError : Error {
  using Error::Error;
};

// A requested split cannot be realized on the given dataset.
struct SplitError : Error {
  using Error::Error;
};

// A cached forward pass does not match the model it is used with.
struct StateError : Error {
  using Error::Error;
};

}  // namespace mlzsr

#endif  // MLZSR_ERRORS_HPP_
