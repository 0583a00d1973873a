#pragma once

#include <stdexcept>
#include <string>

namespace hydrobell {

// Invalid configuration or inputs that violate an operation's preconditions.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Coordinate outside the bath domain.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver divergence, singular factorization, failed bracket, and similar
// runtime numerical failures. CLI exit code 1.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& msg, long step = -1, double max_eta = 0.0)
      : std::runtime_error(msg), step_index(step), max_abs_eta(max_eta) {}
  long step_index;
  double max_abs_eta;
};

// A droplet entered a region the model declares unreachable (the central
// cavity, or the far subsystem). Indicates mis-calibrated parameters.
class ModelViolation : public std::runtime_error {
 public:
  explicit ModelViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Bisection bracket without a sign change; carries both endpoint rates in
// the message.
class BracketError : public NumericalError {
 public:
  explicit BracketError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace hydrobell
