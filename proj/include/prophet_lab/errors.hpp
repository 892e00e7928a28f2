#pragma once

#include <stdexcept>
#include <string>

namespace prophet {

/// Input data violates a documented invariant (bad distribution, bad
/// witness, precondition on a numeric argument).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Inconsistent or unknown configuration (unknown policy, mode/parameter
/// mismatch).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace prophet
