#pragma once

#include <stdexcept>
#include <string>

namespace kces {

/// Broad failure class. The CLI maps each category onto its exit code.
enum class ErrorCategory {
  input,    // malformed files, missing edges, out-of-range ids, shape mismatches
  numeric,  // degenerate features, ill-conditioned systems, divergence
  config,   // infeasible or out-of-domain parameters
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

}  // namespace kces
