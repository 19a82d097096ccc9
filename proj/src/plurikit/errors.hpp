#pragma once

#include <stdexcept>
#include <string>

namespace plurikit {

//! Invalid input: dimensions, radii, budgets, malformed configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Overflow, NaN, or a quadrature that refuses to converge.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! The restricted current is undefined: the subspace lies in the support
//! (e.g. a line inside the hypersurface).
class DegenerateSlice : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Argument outside the mathematical domain of a function (e.g. r <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace plurikit
