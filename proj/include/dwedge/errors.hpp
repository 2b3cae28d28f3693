#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dwedge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. Im z <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A fixed-point or root iteration failed to reach its tolerance.
class IterationError : public Error {
 public:
  IterationError(const std::string& what, double last_residual,
                 std::ptrdiff_t index = -1)
      : Error(what), last_residual_(last_residual), index_(index) {}

  double last_residual() const noexcept { return last_residual_; }
  /// Grid index of the failing point, or -1 for single-point solves.
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  double last_residual_;
  std::ptrdiff_t index_;
};

/// The potential law and coupling violate the single-interval/square-root
/// edge condition inf_x int dnu/(v-x)^2 >= lambda^2.
class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

/// A precondition on a numerical input (grid size, symmetry, ...) failed.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or serialized input. `field()` names the key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dwedge
