#pragma once

// Limit-cycle statistics, attractor search over initial conditions and
// powers, amplitude clustering and photon-number peak detection.

#include <optional>
#include <string>
#include <vector>

#include "omsim/classical.hpp"

namespace omsim {

struct CycleStats {
  double a_min = 0;  // m
  double a_max = 0;  // m
  double a_bar = 0;  // m, sqrt((a_min^2 + a_max^2) / 2)
  double period_estimate = 0;  // s; 0 when no oscillation is left
  bool converged = false;
};

/// Average amplitude of a cycle from its extreme radii.
double average_amplitude(double a_min, double a_max);

struct RunPolicy {
  int relax_periods = 300;
  int window_periods = 20;
  int max_extensions = 3;
  int extension_periods = 100;
  double drift_tolerance = 1e-3;  // relative per-cycle A_bar spread
  /// Orbits whose largest radius stays below this (in lambda_n) have fallen
  /// onto the equilibrium and count as converged.
  double fixed_point_tolerance_lambda = 1e-3;

  void validate() const;
  bool operator==(const RunPolicy&) const = default;
};

struct AttractorRecord {
  double power = 0;              // W
  double initial_amplitude = 0;  // m
  CycleStats stats;
  ClassicalState final_state;
  int extensions_used = 0;
  std::string error;  // non-empty if the run failed

  bool ok() const { return error.empty(); }
};

/// Radial distance from (q_s, 0) in the (q, p / (m omega_m)) plane.
double phase_space_amplitude(const ClassicalState& state, const SystemParams& params);

/// Statistics over the last `analysis_window` nominal mechanical periods.
/// Throws std::invalid_argument if the trajectory is shorter than the window.
CycleStats extract_cycle_stats(const Trajectory& traj, int analysis_window, const RunPolicy& policy = {});

/// Relax from q0 = q_s + initial_amplitude (at rest, empty cavity) at the
/// given power and report the attractor reached. Uses config.dt and
/// config.sample_stride; config.duration is ignored.
AttractorRecord run_to_attractor(double initial_amplitude, double power, const Model& model,
                                 const IntegrationConfig& config, const RunPolicy& policy);

/// Same, but starting from an arbitrary state (e.g. a previous orbit).
AttractorRecord run_to_attractor_from(const ClassicalState& initial, double power, const Model& model,
                                      const IntegrationConfig& config, const RunPolicy& policy);

/// One record per (power, initial amplitude), power-major. Pairs run on a
/// worker pool of `threads` workers (0 = default parallelism); failures are
/// recorded per pair.
std::vector<AttractorRecord> sweep_attractors(const std::vector<double>& power_grid,
                                              const std::vector<double>& ic_grid, const Model& model,
                                              const IntegrationConfig& config, const RunPolicy& policy,
                                              unsigned threads = 0);

struct AmplitudeCluster {
  double center = 0;  // mean A_bar, m
  double min = 0;
  double max = 0;
  int count = 0;

  double spread() const { return max - min; }
};

struct PowerClusters {
  double power = 0;
  std::vector<AmplitudeCluster> clusters;  // ascending center
};

/// Single-linkage grouping of converged A_bar values per power (ascending).
std::vector<PowerClusters> cluster_amplitudes(const std::vector<AttractorRecord>& records, double epsilon);

struct ResonancePeak {
  double t = 0;              // s
  double q0 = 0;             // m
  double photon_number = 0;
  int k = 0;                 // nearest resonance q_s + k lambda_n / 4
  double offset = 0;         // q0 - (q_s + k lambda_n / 4), m
};

inline constexpr double kDefaultPeakFloor = 1e-3;

/// Photon-number peaks, one per resonance-crossing event: the trajectory is
/// cut wherever q0 crosses a point of the q_s + k lambda_n / 4 grid, and each
/// piece contributes its largest |alpha|^2 sample if that sample is an
/// interior local maximum above floor_fraction * (global maximum).
/// Throws std::invalid_argument if samples are spaced wider than 0.1 / kappa.
std::vector<ResonancePeak> detect_resonance_peaks(const Trajectory& traj, double floor_fraction = kDefaultPeakFloor);

/// Peak detection on bare arrays (shared with the co-simulation output).
std::vector<ResonancePeak> detect_resonance_peaks(const std::vector<ClassicalState>& samples, const Model& model,
                                                  double floor_fraction = kDefaultPeakFloor);

}  // namespace omsim
