#pragma once

// Built-in oracle suite run by `omsim validate`. Each check compares the
// implementation with a closed form or an independent evaluation.

#include <iosfwd>
#include <string>
#include <vector>

#include "omsim/attractor.hpp"
#include "omsim/model.hpp"

namespace omsim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct LandscapeCheck {
  double periodicity = 0;      // worst |omega(q + lambda/2) - omega(q)| / (|omega(q) - omega_n| + 1e-3 / 1e-9)
  double parity_sum = 0;       // worst |sum - const| / tolerance
  double d1_rel = 0;           // worst relative error vs 5-point differences
  double d2_rel = 0;
  double cancellation = 0;     // worst |detuning - (omega_c - omega_l)|, rad/s
};

/// Mode landscape properties over `points` positions covering one period.
LandscapeCheck check_landscape(const Model& model, int points = 1000);

/// Worst relative deviation of the clamped-membrane photon number from
/// alpha_L^2 / (kappa^2 + Delta^2) at `count` detunings spanning +-span*kappa,
/// after integrating `settle` / kappa.
double lorentzian_oracle(const Model& model, int count = 11, double span = 10.0, double settle = 20.0);

/// Worst relative deviation of the phase-space radius from d exp(-gamma t/2)
/// for an undriven membrane released from q_s + d, over `periods`.
double damped_decay_oracle(const Model& model, double d, double periods = 10.0);

/// Worst relative deviation of V from thermal x vacuum after `gamma_times`/gamma
/// of undriven co-simulation started there.
double stationarity_oracle(const Model& model, double gamma_times = 50.0);

/// Worst |E_N - 2r| over r in {0.1, 0.5, 1.0}.
double tmsv_oracle();

std::vector<CheckResult> run_validation_suite(const Model& model, const IntegrationConfig& integration,
                                              const RunPolicy& policy);

void print_results(const std::vector<CheckResult>& results, std::ostream& out);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace omsim
