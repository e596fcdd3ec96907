#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bsnkit {

// Bad user input: parameter sets, configs, preconditions on arguments.
// code() is a stable machine-readable tag for config validation reports.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, std::string code = "invalid_value")
      : std::invalid_argument(what), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// A numerical procedure could not deliver its result (no crossing,
// non-convergence, unstable step).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsnkit
