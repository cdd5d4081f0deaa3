#pragma once

#include <stdexcept>
#include <string>

namespace geoml {

/// Malformed or inconsistent input (bad dimensions, unknown labels, out-of-range
/// parameters). Maps to CLI exit status 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input is well formed but numerically outside the domain of the operation
/// (non-SPD matrix, negative radicand beyond tolerance). Maps to CLI exit status 2.
class NumericalError : public std::domain_error {
 public:
  explicit NumericalError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace geoml
