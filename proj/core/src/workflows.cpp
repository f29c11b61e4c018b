#include "omsim/workflows.hpp"

#include <stdexcept>

namespace omsim {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

std::optional<AttractorRecord> smallest_converged(const std::vector<AttractorRecord>& records) {
  std::optional<AttractorRecord> best;
  for (const auto& r : records) {
    if (!r.ok() || !r.stats.converged || r.stats.period_estimate == 0.0) continue;
    if (!best || r.stats.a_bar < best->stats.a_bar) best = r;
  }
  return best;
}

EntanglementRun run_entanglement(const Model& model, const IntegrationConfig& classical, const RunPolicy& policy,
                                 const EntanglementPlan& plan, unsigned threads) {
  EntanglementRun run;
  run.model = model.with_power(plan.power).with_temperature(plan.temperature);

  if (plan.initial_amplitude) {
    run.seed = run_to_attractor(*plan.initial_amplitude, plan.power, run.model, classical, policy);
    if (!run.seed.stats.converged) throw std::runtime_error("entanglement: seed orbit did not converge");
  } else {
    if (plan.ic_grid.empty()) throw std::invalid_argument("entanglement: empty initial-condition grid");
    const auto records = sweep_attractors({plan.power}, plan.ic_grid, run.model, classical, policy, threads);
    auto best = smallest_converged(records);
    if (!best) throw std::runtime_error("entanglement: no converged attractor on the initial-condition grid");
    run.seed = *best;
  }

  run.config = CoSimConfig::defaults_for(run.model, plan.periods);
  if (plan.dt > 0) run.config.dt = plan.dt;
  run.config.sample_stride = plan.sample_stride;

  ClassicalState start = run.seed.final_state;
  start.t = 0.0;
  run.samples = cosimulate(start, initial_covariance(run.model.scales), run.model, run.config);
  return run;
}

std::vector<LandscapePoint> sample_landscape(const Model& model, double q_lo, double q_hi, int points) {
  std::vector<LandscapePoint> out;
  const double omega_n = model.scales.omega_n;
  for (double q : linspace(q_lo, q_hi, points)) {
    const double e = mode_frequency_jet(q, ModeParity::even, model).omega_c - omega_n;
    const double o = mode_frequency_jet(q, ModeParity::odd, model).omega_c - omega_n;
    out.push_back(LandscapePoint{q, e, o});
  }
  return out;
}

}  // namespace omsim
