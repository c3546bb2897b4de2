#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clustergen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An archetype, configuration or input failed validation. Carries one
/// message per violated constraint.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  ValidationError(const std::string& what, std::vector<std::string> violations)
      : Error(what), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Center placement ran out of epochs before the overlap loss vanished.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(double final_loss, std::vector<double> trace);

  double final_loss() const noexcept { return final_loss_; }
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  double final_loss_;
  std::vector<double> trace_;
};

}  // namespace clustergen
