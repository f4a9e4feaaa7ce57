#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vbi {

/// Invalid user input: bad spec values, malformed config, inconsistent sizes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The assembled model cannot be solved (singular stiffness, degenerate modes).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time integration produced non-finite values or could not proceed.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The coupled compatibility loop hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t step, double residual)
      : std::runtime_error(what), step_(step), residual_(residual) {}

  std::size_t step() const noexcept { return step_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t step_;
  double residual_;
};

/// A closed-form amplitude was requested exactly at one of its poles.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace vbi
