#include "omsim/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "omsim/errors.hpp"
#include "omsim/parallel.hpp"

namespace omsim {

double average_amplitude(double a_min, double a_max) {
  return std::sqrt(0.5 * (a_min * a_min + a_max * a_max));
}

void RunPolicy::validate() const {
  if (relax_periods < 0) throw ParameterError("run_policy.relax_periods", "must be >= 0");
  if (window_periods < 2) throw ParameterError("run_policy.window_periods", "must be >= 2");
  if (max_extensions < 0) throw ParameterError("run_policy.max_extensions", "must be >= 0");
  if (extension_periods < 0) throw ParameterError("run_policy.extension_periods", "must be >= 0");
  if (!(drift_tolerance > 0)) throw ParameterError("run_policy.drift_tolerance", "must be > 0");
  if (!(fixed_point_tolerance_lambda >= 0)) {
    throw ParameterError("run_policy.fixed_point_tolerance_lambda", "must be >= 0");
  }
}

double phase_space_amplitude(const ClassicalState& state, const SystemParams& params) {
  return std::hypot(state.q0 - params.q_s, state.p0 / (params.mass * params.omega_m));
}

CycleStats extract_cycle_stats(const Trajectory& traj, int analysis_window, const RunPolicy& policy) {
  const auto& samples = traj.samples;
  const auto& params = traj.model.params;
  if (analysis_window < 1) throw std::invalid_argument("analysis window must be >= 1 period");
  if (samples.size() < 2) throw std::invalid_argument("trajectory has fewer than two samples");

  const double period = traj.model.mechanical_period();
  const double t_end = samples.back().t;
  const double t_start = t_end - analysis_window * period;
  const double slack = 0.5 * traj.sample_interval();
  if (samples.front().t > t_start + slack) {
    throw std::invalid_argument("analysis window longer than trajectory");
  }

  std::size_t first = 0;
  while (first < samples.size() && samples[first].t < t_start - slack) ++first;

  CycleStats stats;
  stats.a_min = std::numeric_limits<double>::infinity();
  stats.a_max = 0.0;
  std::vector<double> radius(samples.size() - first);
  for (std::size_t i = first; i < samples.size(); ++i) {
    const double r = phase_space_amplitude(samples[i], params);
    radius[i - first] = r;
    stats.a_min = std::min(stats.a_min, r);
    stats.a_max = std::max(stats.a_max, r);
  }
  stats.a_bar = average_amplitude(stats.a_min, stats.a_max);

  if (stats.a_max < policy.fixed_point_tolerance_lambda * traj.model.scales.lambda_n) {
    stats.converged = true;
    stats.period_estimate = 0.0;
    return stats;
  }

  // Upward zero crossings of p0 split the window into whole cycles.
  std::vector<std::size_t> crossing_index;
  std::vector<double> crossing_time;
  for (std::size_t i = first + 1; i < samples.size(); ++i) {
    const double a = samples[i - 1].p0;
    const double b = samples[i].p0;
    if (a < 0.0 && b >= 0.0) {
      const double frac = a / (a - b);
      crossing_index.push_back(i - first);
      crossing_time.push_back(samples[i - 1].t + frac * (samples[i].t - samples[i - 1].t));
    }
  }
  if (crossing_time.size() >= 2) {
    stats.period_estimate = (crossing_time.back() - crossing_time.front()) /
                            static_cast<double>(crossing_time.size() - 1);
  }
  if (crossing_index.size() < 3) return stats;

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < crossing_index.size(); ++c) {
    const auto begin = radius.begin() + static_cast<std::ptrdiff_t>(crossing_index[c]);
    const auto end = radius.begin() + static_cast<std::ptrdiff_t>(crossing_index[c + 1]) + 1;
    const auto [mn, mx] = std::minmax_element(begin, end);
    const double a_bar = average_amplitude(*mn, *mx);
    lo = std::min(lo, a_bar);
    hi = std::max(hi, a_bar);
    sum += a_bar;
  }
  const double mean = sum / static_cast<double>(crossing_index.size() - 1);
  stats.converged = (hi - lo) < policy.drift_tolerance * mean;
  return stats;
}

AttractorRecord run_to_attractor_from(const ClassicalState& initial, double power, const Model& model,
                                      const IntegrationConfig& config, const RunPolicy& policy) {
  policy.validate();
  const Model driven = model.with_power(power);
  IntegrationConfig window = config;
  const double period = driven.mechanical_period();
  // Whole number of strides so the last sample is the final state.
  const auto stride = static_cast<std::int64_t>(config.sample_stride);
  const auto window_steps =
      static_cast<std::int64_t>(std::ceil(policy.window_periods * period / config.dt / stride)) * stride;
  window.duration = static_cast<double>(window_steps) * config.dt;
  window.validate(driven);

  const ClassicalSystem system(driven);
  AttractorRecord record;
  record.power = power;
  record.initial_amplitude = initial.q0 - driven.params.q_s;

  ClassicalState state =
      advance(initial, system, config.dt, std::llround(policy.relax_periods * period / config.dt));
  for (int ext = 0;; ++ext) {
    const Trajectory traj = simulate(state, driven, window);
    record.stats = extract_cycle_stats(traj, policy.window_periods, policy);
    record.final_state = traj.samples.back();
    record.extensions_used = ext;
    if (record.stats.converged || ext == policy.max_extensions) break;
    state = advance(record.final_state, system, config.dt,
                    std::llround(policy.extension_periods * period / config.dt));
  }
  return record;
}

AttractorRecord run_to_attractor(double initial_amplitude, double power, const Model& model,
                                 const IntegrationConfig& config, const RunPolicy& policy) {
  return run_to_attractor_from(resting_state(model, initial_amplitude), power, model, config, policy);
}

std::vector<AttractorRecord> sweep_attractors(const std::vector<double>& power_grid,
                                              const std::vector<double>& ic_grid, const Model& model,
                                              const IntegrationConfig& config, const RunPolicy& policy,
                                              unsigned threads) {
  if (power_grid.empty()) throw std::invalid_argument("sweep: empty power grid");
  if (ic_grid.empty()) throw std::invalid_argument("sweep: empty initial-condition grid");

  const std::size_t n_ic = ic_grid.size();
  std::vector<AttractorRecord> records(power_grid.size() * n_ic);
  parallel_for(records.size(), threads, [&](std::size_t idx) {
    const double power = power_grid[idx / n_ic];
    const double amplitude = ic_grid[idx % n_ic];
    try {
      records[idx] = run_to_attractor(amplitude, power, model, config, policy);
    } catch (const std::exception& e) {
      AttractorRecord failed;
      failed.power = power;
      failed.initial_amplitude = amplitude;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      failed.stats = CycleStats{nan, nan, nan, nan, false};
      failed.error = e.what();
      records[idx] = failed;
    }
  });
  return records;
}

std::vector<PowerClusters> cluster_amplitudes(const std::vector<AttractorRecord>& records, double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("cluster epsilon must be > 0");
  std::map<double, std::vector<double>> by_power;
  for (const auto& r : records) {
    by_power[r.power];  // powers with no converged record still get an entry
    if (r.ok() && r.stats.converged) by_power[r.power].push_back(r.stats.a_bar);
  }

  std::vector<PowerClusters> out;
  out.reserve(by_power.size());
  for (auto& [power, values] : by_power) {
    std::sort(values.begin(), values.end());
    PowerClusters pc{power, {}};
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i == 0 || values[i] - values[i - 1] > epsilon) {
        pc.clusters.push_back(AmplitudeCluster{0.0, values[i], values[i], 0});
      }
      auto& c = pc.clusters.back();
      c.center += values[i];
      c.max = values[i];
      ++c.count;
    }
    for (auto& c : pc.clusters) c.center /= c.count;
    out.push_back(std::move(pc));
  }
  return out;
}

std::vector<ResonancePeak> detect_resonance_peaks(const std::vector<ClassicalState>& samples, const Model& model,
                                                  double floor_fraction) {
  std::vector<ResonancePeak> peaks;
  if (samples.size() < 3) return peaks;
  const double spacing = samples[1].t - samples[0].t;
  if (spacing * model.params.kappa >= 0.1) {
    throw std::invalid_argument("detect_resonance_peaks: sample interval must be < 0.1/kappa");
  }

  const double quarter = 0.25 * model.scales.lambda_n;
  const double q_s = model.params.q_s;
  std::vector<double> n(samples.size());
  std::vector<long> cell(samples.size());
  double global_max = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    n[i] = samples[i].photon_number();
    cell[i] = static_cast<long>(std::floor((samples[i].q0 - q_s) / quarter));
    global_max = std::max(global_max, n[i]);
  }
  const double floor = floor_fraction * global_max;

  auto emit = [&](std::size_t begin, std::size_t end) {
    const auto it = std::max_element(n.begin() + static_cast<std::ptrdiff_t>(begin),
                                     n.begin() + static_cast<std::ptrdiff_t>(end));
    const auto i = static_cast<std::size_t>(it - n.begin());
    if (i == 0 || i + 1 >= n.size()) return;
    if (!(n[i] > n[i - 1] && n[i] >= n[i + 1] && n[i] > floor)) return;
    const double rel = (samples[i].q0 - q_s) / quarter;
    const int k = static_cast<int>(std::lround(rel));
    peaks.push_back(ResonancePeak{samples[i].t, samples[i].q0, n[i], k, samples[i].q0 - (q_s + k * quarter)});
  };

  std::size_t begin = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (cell[i] != cell[i - 1]) {
      emit(begin, i);
      begin = i;
    }
  }
  emit(begin, samples.size());
  return peaks;
}

std::vector<ResonancePeak> detect_resonance_peaks(const Trajectory& traj, double floor_fraction) {
  return detect_resonance_peaks(traj.samples, traj.model, floor_fraction);
}

}  // namespace omsim
