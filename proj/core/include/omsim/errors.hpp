#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace omsim {

/// A parameter or configuration field failed validation. `field()` is the
/// dotted path of the offending field, e.g. "params.r_c".
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical integration broke down (non-finite state or step guard
/// violation). Carries the simulation time of the last good state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& message, double last_good_time)
      : std::runtime_error(message), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// The propagated covariance left the physical (Heisenberg) region or a
/// Gaussian-state radicand went negative beyond roundoff.
class PhysicalityError : public std::runtime_error {
 public:
  PhysicalityError(const std::string& message, double time)
      : std::runtime_error(message), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace omsim
