#pragma once

// Mean-field (classical) dynamics of the membrane and the driven cavity mode.
//
// The public types are in SI units. Integration runs internally on the
// nondimensional state (x, y, Re alpha, Im alpha) with
//   x = q0 / lambda_n,  y = p0 / (m omega_m lambda_n),  tau = omega_m t,
// so every component stays O(1) (alpha is left as a photon amplitude).

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "omsim/model.hpp"
#include "omsim/rk4.hpp"

namespace omsim {

struct ClassicalState {
  double t = 0;                      // s
  double q0 = 0;                     // m
  double p0 = 0;                     // kg m/s
  std::complex<double> alpha{0, 0};  // |alpha|^2 = intracavity photons

  double photon_number() const { return std::norm(alpha); }
  bool finite() const;
  bool operator==(const ClassicalState&) const = default;
};

/// Membrane at q0 = q_s + amplitude, at rest, empty cavity.
ClassicalState resting_state(const Model& model, double amplitude);

struct ClassicalDerivative {
  double dq0_dt = 0;
  double dp0_dt = 0;
  std::complex<double> dalpha_dt{0, 0};
};

/// Right-hand side of the mean-field equations, evaluated directly in SI.
ClassicalDerivative classical_rhs(const ClassicalState& state, const Model& model);

/// Steady cavity amplitude with the membrane held fixed at `q_fixed`.
std::complex<double> clamped_cavity_steady_state(double q_fixed, const Model& model);

inline constexpr double kDefaultDtKappa = 0.0025;     // default dt in units of 1/kappa
inline constexpr double kDefaultStiffnessGuard = 0.02;
/// Per-step bound on dt * |cavity pole| = dt * sqrt(kappa^2 + detuning^2).
/// RK4 is unstable on the imaginary axis beyond 2*sqrt(2).
inline constexpr double kCavityPhaseStepLimit = 2.5;

struct IntegrationConfig {
  double dt = 0;           // s
  double duration = 0;     // s
  int sample_stride = 32;  // record every k-th step
  double stiffness_guard = kDefaultStiffnessGuard;  // max kappa * dt

  /// dt = kDefaultDtKappa / kappa, duration = `periods` mechanical periods.
  static IntegrationConfig defaults_for(const Model& model, double periods = 20.0);

  /// Throws ParameterError (fields prefixed "integration.").
  void validate(const Model& model) const;
  std::int64_t step_count() const;
  bool operator==(const IntegrationConfig&) const = default;
};

struct Trajectory {
  std::vector<ClassicalState> samples;
  Model model;
  IntegrationConfig config;

  double sample_interval() const { return config.dt * config.sample_stride; }
};

/// Scaled equations of motion. Optionally clamps the membrane (q0, p0 frozen),
/// which turns the cavity into a driven linear oscillator.
class ClassicalSystem {
 public:
  using Vec = StateVec<4>;

  explicit ClassicalSystem(const Model& model, bool clamp_membrane = false);

  /// d/dtau of (x, y, Re alpha, Im alpha).
  Vec derivative(const Vec& s) const;

  Vec to_scaled(const ClassicalState& state) const;
  ClassicalState from_scaled(const Vec& s, double t) const;

  /// Scaled detuning Delta / omega_m at x.
  double scaled_detuning(double x) const { return landscape_.detuning(x) * inv_omega_m_; }
  double scaled_kappa() const { return kappa_; }
  const Model& model() const { return model_; }
  bool clamped() const { return clamp_; }

  // Coefficients of the scaled radiation force and damping; exposed for the
  // energy-balance and covariance integrators.
  double force_scale() const { return force_scale_; }
  double scaled_gamma() const { return gamma_; }
  double x_s() const { return x_s_; }
  const detail::ScaledLandscape& landscape() const { return landscape_; }

 private:
  Model model_;
  detail::ScaledLandscape landscape_;
  bool clamp_;
  double inv_omega_m_;
  double force_scale_;  // hbar / (m omega_m^2 lambda_n^2), times d omega/dx |alpha|^2
  double gamma_;        // gamma / omega_m
  double kappa_;        // kappa / omega_m
  double drive_;        // alpha_L / omega_m
  double x_s_;
  double lambda_;
  double momentum_unit_;  // m omega_m lambda_n
};

/// One RK4 step of length dt (seconds). Throws IntegrationError if the
/// result is not finite.
ClassicalState rk4_step(const ClassicalState& state, double dt, const ClassicalSystem& system);

/// Fixed-step integration over config.duration, recording the initial state
/// and then every sample_stride-th step.
Trajectory simulate(const ClassicalState& initial, const Model& model, const IntegrationConfig& config,
                    bool clamp_membrane = false);

/// Advances `steps` steps of size config.dt without recording.
ClassicalState advance(const ClassicalState& initial, const ClassicalSystem& system, double dt,
                       std::int64_t steps);

/// Work done by radiation pressure and energy dissipated by damping over an
/// integer number of mechanical cycles (delimited by upward zero crossings of
/// p0). Both integrals are carried as extra RK4 states.
struct EnergyBalance {
  double radiation_work = 0;  // J
  double dissipation = 0;     // J
  double duration = 0;        // s
  int cycles = 0;

  double relative_mismatch() const {
    return dissipation > 0 ? (radiation_work - dissipation) / dissipation : 0.0;
  }
};

EnergyBalance energy_balance(const ClassicalState& start, const Model& model, double dt, int cycles = 1,
                             double max_search_periods = 4.0);

}  // namespace omsim
