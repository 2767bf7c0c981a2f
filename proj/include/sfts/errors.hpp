#ifndef SFTS_ERRORS_HPP
#define SFTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sfts {

/// Bad user input: out-of-range parameters, conflicting options.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (CSV parse errors, bad headers).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: singular local systems, failed factorizations,
/// broken symmetries detected at runtime.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sfts

#endif
