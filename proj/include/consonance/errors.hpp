#pragma once

#include <stdexcept>
#include <string>

namespace consonance {

/// A state or parameter failed a physical validity check (normalization,
/// hermiticity, trace, positivity, parameter range).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The caller asked for something ill-formed: wrong sizes, bad indices,
/// unknown names.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A circuit layer violates the non-global support rule.
class ConstraintError : public UsageError {
 public:
  using UsageError::UsageError;
};

}  // namespace consonance
