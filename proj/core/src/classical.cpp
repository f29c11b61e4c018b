#include "omsim/classical.hpp"

#include <cmath>
#include <sstream>

#include "omsim/errors.hpp"

namespace omsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string describe_failure(const char* what, double t) {
  std::ostringstream os;
  os << what << " at t = " << t << " s";
  return os.str();
}

}  // namespace

bool ClassicalState::finite() const {
  return std::isfinite(t) && std::isfinite(q0) && std::isfinite(p0) && std::isfinite(alpha.real()) &&
         std::isfinite(alpha.imag());
}

ClassicalState resting_state(const Model& model, double amplitude) {
  return ClassicalState{0.0, model.params.q_s + amplitude, 0.0, {0.0, 0.0}};
}

ClassicalDerivative classical_rhs(const ClassicalState& state, const Model& model) {
  if (!state.finite()) throw IntegrationError("non-finite classical state", state.t);
  const auto& p = model.params;
  const FrequencyJet jet = mode_frequency_jet(state.q0, p.parity, model);
  const double delta = detuning(state.q0, model);
  const std::complex<double> i{0.0, 1.0};

  ClassicalDerivative d;
  d.dq0_dt = state.p0 / p.mass;
  d.dp0_dt = -model.constants.hbar * jet.d1 * state.photon_number() -
             p.mass * p.omega_m * p.omega_m * (state.q0 - p.q_s) - p.gamma * state.p0;
  d.dalpha_dt = -i * delta * state.alpha - i * model.scales.alpha_L - p.kappa * state.alpha;
  return d;
}

std::complex<double> clamped_cavity_steady_state(double q_fixed, const Model& model) {
  const std::complex<double> i{0.0, 1.0};
  return -i * model.scales.alpha_L / (model.params.kappa + i * detuning(q_fixed, model));
}

IntegrationConfig IntegrationConfig::defaults_for(const Model& model, double periods) {
  IntegrationConfig cfg;
  cfg.dt = kDefaultDtKappa / model.params.kappa;
  cfg.duration = periods * model.mechanical_period();
  return cfg;
}

void IntegrationConfig::validate(const Model& model) const {
  if (!(std::isfinite(dt) && dt > 0)) throw ParameterError("integration.dt", "must be > 0");
  if (!(std::isfinite(duration) && duration >= 0)) throw ParameterError("integration.duration", "must be >= 0");
  if (sample_stride < 1) throw ParameterError("integration.sample_stride", "must be >= 1");
  if (!(std::isfinite(stiffness_guard) && stiffness_guard > 0)) {
    throw ParameterError("integration.stiffness_guard", "must be > 0");
  }
  if (model.params.kappa * dt > stiffness_guard) {
    std::ostringstream os;
    os << "kappa*dt = " << model.params.kappa * dt << " exceeds stiffness_guard " << stiffness_guard;
    throw ParameterError("integration.dt", os.str());
  }
  const double delta = max_abs_detuning(model);
  const double pole = std::hypot(model.params.kappa, delta);
  if (pole * dt > kCavityPhaseStepLimit) {
    std::ostringstream os;
    os << "dt*sqrt(kappa^2+max|detuning|^2) = " << pole * dt << " exceeds the RK4 stability limit "
       << kCavityPhaseStepLimit;
    throw ParameterError("integration.dt", os.str());
  }
}

std::int64_t IntegrationConfig::step_count() const { return std::llround(duration / dt); }

ClassicalSystem::ClassicalSystem(const Model& model, bool clamp_membrane)
    : model_(model),
      landscape_(model),
      clamp_(clamp_membrane),
      inv_omega_m_(1.0 / model.params.omega_m) {
  const auto& p = model.params;
  const auto& s = model.scales;
  force_scale_ = model.constants.hbar / (p.mass * p.omega_m * p.omega_m * s.lambda_n * s.lambda_n);
  gamma_ = p.gamma / p.omega_m;
  kappa_ = p.kappa / p.omega_m;
  drive_ = s.alpha_L / p.omega_m;
  x_s_ = p.q_s / s.lambda_n;
  lambda_ = s.lambda_n;
  momentum_unit_ = p.mass * p.omega_m * s.lambda_n;
}

ClassicalSystem::Vec ClassicalSystem::derivative(const Vec& s) const {
  const double x = s[0];
  const double y = s[1];
  const double re = s[2];
  const double im = s[3];
  const auto land = landscape_.at(x);
  const double delta = land.detuning * inv_omega_m_;

  Vec d;
  if (clamp_) {
    d[0] = 0.0;
    d[1] = 0.0;
  } else {
    d[0] = y;
    d[1] = -force_scale_ * land.d1 * (re * re + im * im) - (x - x_s_) - gamma_ * y;
  }
  // d alpha/dtau = -i delta alpha - i drive - kappa alpha
  d[2] = delta * im - kappa_ * re;
  d[3] = -delta * re - drive_ - kappa_ * im;
  return d;
}

ClassicalSystem::Vec ClassicalSystem::to_scaled(const ClassicalState& state) const {
  return {state.q0 / lambda_, state.p0 / momentum_unit_, state.alpha.real(), state.alpha.imag()};
}

ClassicalState ClassicalSystem::from_scaled(const Vec& s, double t) const {
  return ClassicalState{t, s[0] * lambda_, s[1] * momentum_unit_, {s[2], s[3]}};
}

ClassicalState rk4_step(const ClassicalState& state, double dt, const ClassicalSystem& system) {
  const double h = dt * system.model().params.omega_m;
  const auto next = rk4_advance(system.to_scaled(state), h, [&](const auto& v) { return system.derivative(v); });
  if (!all_finite(next)) throw IntegrationError(describe_failure("non-finite RK4 step", state.t), state.t);
  return system.from_scaled(next, state.t + dt);
}

ClassicalState advance(const ClassicalState& initial, const ClassicalSystem& system, double dt,
                       std::int64_t steps) {
  const double h = dt * system.model().params.omega_m;
  auto f = [&](const ClassicalSystem::Vec& v) { return system.derivative(v); };
  ClassicalSystem::Vec s = system.to_scaled(initial);
  for (std::int64_t i = 0; i < steps; ++i) {
    const auto next = rk4_advance(s, h, f);
    if (!all_finite(next)) {
      const double t = initial.t + static_cast<double>(i) * dt;
      throw IntegrationError(describe_failure("non-finite RK4 step", t), t);
    }
    s = next;
  }
  return system.from_scaled(s, initial.t + static_cast<double>(steps) * dt);
}

Trajectory simulate(const ClassicalState& initial, const Model& model, const IntegrationConfig& config,
                    bool clamp_membrane) {
  config.validate(model);
  if (!initial.finite()) throw IntegrationError("non-finite initial state", initial.t);

  const ClassicalSystem system(model, clamp_membrane);
  const std::int64_t steps = config.step_count();
  const double h = config.dt * model.params.omega_m;
  auto f = [&](const ClassicalSystem::Vec& v) { return system.derivative(v); };

  Trajectory traj{{}, model, config};
  traj.samples.reserve(static_cast<std::size_t>(steps / config.sample_stride + 1));
  traj.samples.push_back(initial);

  ClassicalSystem::Vec s = system.to_scaled(initial);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const auto next = rk4_advance(s, h, f);
    if (!all_finite(next)) {
      const double t = initial.t + static_cast<double>(i - 1) * config.dt;
      throw IntegrationError(describe_failure("non-finite RK4 step", t), t);
    }
    s = next;
    if (i % config.sample_stride == 0) {
      traj.samples.push_back(system.from_scaled(s, initial.t + static_cast<double>(i) * config.dt));
    }
  }
  return traj;
}

EnergyBalance energy_balance(const ClassicalState& start, const Model& model, double dt, int cycles,
                             double max_search_periods) {
  const ClassicalSystem system(model);
  const double h = dt * model.params.omega_m;
  const auto search_limit = static_cast<std::int64_t>(std::ceil(max_search_periods * kTwoPi / h));
  auto f4 = [&](const ClassicalSystem::Vec& v) { return system.derivative(v); };

  // Phase 1: run up to the first upward zero crossing of the momentum.
  ClassicalSystem::Vec s = system.to_scaled(start);
  std::int64_t step = 0;
  for (;; ++step) {
    if (step > search_limit) {
      throw IntegrationError("energy_balance: no upward momentum zero crossing found", start.t);
    }
    const auto next = rk4_advance(s, h, f4);
    if (!all_finite(next)) throw IntegrationError("non-finite RK4 step", start.t + step * dt);
    const bool crossed = s[1] < 0.0 && next[1] >= 0.0;
    s = next;
    if (crossed) break;
  }

  // Phase 2: integrate work and dissipation alongside the state.
  // dE/dtau = y * (-F omega'_x |alpha|^2) - gamma y^2 in units of m omega_m^2 lambda_n^2.
  const double fs = system.force_scale();
  const double g = system.scaled_gamma();
  const auto& land = system.landscape();
  auto f6 = [&](const StateVec<6>& v) {
    const ClassicalSystem::Vec core{v[0], v[1], v[2], v[3]};
    const auto d = system.derivative(core);
    const double n = v[2] * v[2] + v[3] * v[3];
    const double d1 = land.at(v[0]).d1;
    return StateVec<6>{d[0], d[1], d[2], d[3], -fs * d1 * n * v[1], g * v[1] * v[1]};
  };

  StateVec<6> a{s[0], s[1], s[2], s[3], 0.0, 0.0};
  int seen = 0;
  std::int64_t steps = 0;
  const auto phase2_limit = search_limit * (cycles + 1);
  while (seen < cycles) {
    if (steps > phase2_limit) throw IntegrationError("energy_balance: cycle did not close", start.t);
    const auto next = rk4_advance(a, h, f6);
    if (!all_finite(next)) throw IntegrationError("non-finite RK4 step", start.t + (step + steps) * dt);
    if (a[1] < 0.0 && next[1] >= 0.0) ++seen;
    a = next;
    ++steps;
  }

  const auto& p = model.params;
  const double energy_unit = p.mass * p.omega_m * p.omega_m * model.scales.lambda_n * model.scales.lambda_n;
  EnergyBalance out;
  out.radiation_work = a[4] * energy_unit;
  out.dissipation = a[5] * energy_unit;
  out.duration = static_cast<double>(steps) * dt;
  out.cycles = cycles;
  return out;
}

}  // namespace omsim
