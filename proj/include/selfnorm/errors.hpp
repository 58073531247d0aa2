#pragma once

#include <stdexcept>
#include <string>

namespace selfnorm {

/// A requested array or transform would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic's denominator vanished on a realized path.
class DegeneratePathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative search ran past its cap without meeting its condition.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value is missing, malformed or out of range. field()
/// names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace selfnorm
