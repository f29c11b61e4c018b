#pragma once

// Multi-step pipelines shared by the CLI, the validation suite and the tests.

#include <optional>
#include <vector>

#include "omsim/attractor.hpp"
#include "omsim/covariance.hpp"

namespace omsim {

/// n evenly spaced values from lo to hi inclusive (n = 1 gives lo).
std::vector<double> linspace(double lo, double hi, int n);

/// Converged, still oscillating record with the smallest A_bar (ties keep the
/// earliest), if any. Orbits that fell onto the equilibrium are skipped.
std::optional<AttractorRecord> smallest_converged(const std::vector<AttractorRecord>& records);

struct EntanglementPlan {
  double power = 0.21;        // W
  double temperature = 1e-3;  // K, used for n_th and the initial covariance
  /// Attractor search grid; the smallest converged cycle seeds the co-simulation.
  std::vector<double> ic_grid;
  /// Used instead of the grid search when set (initial amplitude in m).
  std::optional<double> initial_amplitude;
  double periods = 3.0;  // co-simulation length in mechanical periods
  double dt = 0;         // s; 0 selects CoSimConfig::defaults_for
  int sample_stride = 32;
};

struct EntanglementRun {
  Model model;  // with the plan's power and temperature
  AttractorRecord seed;
  CoSimConfig config;
  std::vector<CoSample> samples;
};

/// Finds the seed orbit, then co-propagates the classical state and the
/// covariance starting from the seed's final state and the thermal/vacuum V.
/// Throws std::runtime_error if no attractor converged.
EntanglementRun run_entanglement(const Model& model, const IntegrationConfig& classical, const RunPolicy& policy,
                                 const EntanglementPlan& plan, unsigned threads = 0);

/// One row per q on a uniform grid over [q_lo, q_hi]: omega_c - omega_n for
/// both parities.
struct LandscapePoint {
  double q = 0;
  double even = 0;  // rad/s
  double odd = 0;   // rad/s
};
std::vector<LandscapePoint> sample_landscape(const Model& model, double q_lo, double q_hi, int points);

}  // namespace omsim
