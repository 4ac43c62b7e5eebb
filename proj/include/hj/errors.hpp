#pragma once

#include <stdexcept>
#include <string>

namespace hj {

/// A computation that cannot complete for numerical reasons (box too small,
/// collision budget exhausted).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent problem specification.
class SpecError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace hj
