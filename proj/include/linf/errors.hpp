#pragma once

#include <stdexcept>
#include <string>

namespace linf {

// Invalid argument values or malformed model specifications.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Mathematically out-of-domain inputs (negative variances, zero signal power, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Overflow or non-finite values produced during a numeric routine.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A posterior whose total mass underflowed to zero.
class DegeneratePosteriorError : public std::runtime_error {
 public:
  explicit DegeneratePosteriorError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad experiment configuration; maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; carries a line number where applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, long line = -1)
      : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace linf
