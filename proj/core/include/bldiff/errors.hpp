#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bldiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value violates a documented constraint.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to meet its tolerance within its iteration cap.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Gain synthesis or the sampled decay certificate failed.
class CertificationError : public Error {
 public:
  CertificationError(std::string what, std::vector<double> sample = {}, int index = -1)
      : Error(std::move(what)), sample_(std::move(sample)), index_(index) {}

  /// Offending sample point, empty if not applicable.
  const std::vector<double>& sample() const noexcept { return sample_; }
  /// Offending component index (zero-based), -1 if not applicable.
  int index() const noexcept { return index_; }

 private:
  std::vector<double> sample_;
  int index_;
};

/// Time integration left the admissible region (non-finite or runaway state).
class DivergenceError : public Error {
 public:
  DivergenceError(std::string what, double t, std::vector<double> last_state)
      : Error(std::move(what)), t_(t), last_state_(std::move(last_state)) {}

  /// Time of the last valid state.
  double time() const noexcept { return t_; }
  const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  double t_;
  std::vector<double> last_state_;
};

}  // namespace bldiff
