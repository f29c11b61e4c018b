#pragma once

// Declarative run description loaded from JSON. Every field has a default;
// unknown keys and invalid values are rejected with the offending field path.
// See schema/runconfig.md for the file format.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "omsim/attractor.hpp"
#include "omsim/classical.hpp"
#include "omsim/model.hpp"

namespace omsim {

struct SweepOptions {
  double power_min = 0.005;  // W
  double power_max = 0.30;   // W
  int power_steps = 60;
  double ic_min_lambda = 0.05;  // initial amplitude, units of lambda_n
  double ic_max_lambda = 3.0;
  int ic_steps = 12;
  double cluster_epsilon_lambda = 0.01;
  unsigned threads = 0;  // 0 = default parallelism

  bool operator==(const SweepOptions&) const = default;
};

struct EntanglementOptions {
  std::optional<double> temperature;  // K; overrides params.temperature
  bool smallest_cycle = true;         // seed from the smallest attractor on the sweep IC grid
  double periods = 3.0;
  double dt = 0;  // s; 0 = automatic
  int sample_stride = 32;

  bool operator==(const EntanglementOptions&) const = default;
};

enum class OutputFormat { csv, svg };

struct OutputSpec {
  std::string path;  // empty = stdout (csv only)
  OutputFormat format = OutputFormat::csv;
  int decimation = 1;                // keep every k-th row
  std::vector<std::string> columns;  // empty = all, in the documented order

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  PhysicalConstants constants;
  SystemParams params;
  IntegrationConfig integration;  // dt and duration in s
  RunPolicy run_policy;
  SweepOptions sweep;
  EntanglementOptions entanglement;
  double init_amplitude_lambda = 0.3;  // simulate: q0(0) = q_s + this * lambda_n
  OutputSpec output;

  Model model() const { return Model::make(params, constants); }
  /// Cross-field checks (parameters, integration guard, policy, grids).
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Defaults with dependent values resolved (gamma, kappa, q_s from omega_m
/// and lambda_n; dt from kappa; duration 20 periods).
RunConfig default_config();

/// Parses and validates. Throws ParameterError with a dotted field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved JSON document; parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config);

/// "<dir>/<stem>.effective.json" next to `anchor`.
std::filesystem::path effective_config_path(const std::filesystem::path& anchor);
void write_effective_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace omsim
