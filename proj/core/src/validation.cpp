#include "omsim/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "omsim/covariance.hpp"
#include "omsim/errors.hpp"

namespace omsim {

namespace {

using ld = long double;

// Independent long-double evaluation of the mode frequency.
ld omega_ld(ld q, ModeParity parity, const Model& model) {
  const auto& p = model.params;
  const ld c_over_L = static_cast<ld>(model.constants.c) / static_cast<ld>(p.cavity_length);
  const ld lambda = static_cast<ld>(p.cavity_length) / p.mode_order;
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld omega_n = 2.0L * p.mode_order * pi * c_over_L;
  const ld r = p.r_c;
  const ld term = std::asin(r * std::cos(4.0L * pi * q / lambda));
  if (parity == ModeParity::even) return omega_n - c_over_L * std::asin(r) + c_over_L * term;
  return omega_n + pi * c_over_L - c_over_L * std::asin(r) - c_over_L * term;
}

// q-dependent part only, for finite differences without the huge constant.
ld swing_ld(ld q, ModeParity parity, const Model& model) {
  const auto& p = model.params;
  const ld c_over_L = static_cast<ld>(model.constants.c) / static_cast<ld>(p.cavity_length);
  const ld lambda = static_cast<ld>(p.cavity_length) / p.mode_order;
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld sign = parity == ModeParity::even ? 1.0L : -1.0L;
  return sign * c_over_L * std::asin(static_cast<ld>(p.r_c) * std::cos(4.0L * pi * q / lambda));
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

template <class F>
CheckResult timed(const std::string& name, F&& body) {
  CheckResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// q in [q_s - lambda/8, q_s + lambda/8] with detuning(q) = target.
double position_for_detuning(const Model& model, double target) {
  const double lambda = model.scales.lambda_n;
  double lo = model.params.q_s - 0.125 * lambda;
  double hi = model.params.q_s + 0.125 * lambda;
  const bool rising = detuning(hi, model) > detuning(lo, model);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((detuning(mid, model) < target) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LandscapeCheck check_landscape(const Model& model, int points) {
  LandscapeCheck out;
  const double lambda = model.scales.lambda_n;
  const double half = 0.5 * lambda;
  const double omega_n = model.scales.omega_n;
  const auto& s = model.scales;
  const ld parity_sum = 2.0L * omega_n + std::numbers::pi_v<ld> * s.c_over_L -
                        2.0L * s.c_over_L * std::asin(static_cast<ld>(model.params.r_c));
  const ld h = static_cast<ld>(lambda) * 1e-4L;

  // Derivative scales, used as a floor where d1 or d2 cross zero.
  const double r = model.params.r_c;
  const double k = 4.0 * std::numbers::pi / lambda;
  const double d1_scale = s.c_over_L * r * k;
  const double d2_scale = s.c_over_L * r * k * k;

  const ld omega_l = model.params.omega_l ? static_cast<ld>(*model.params.omega_l)
                                          : omega_ld(model.params.q_s, model.params.parity, model);

  for (int i = 0; i < points; ++i) {
    const double q = half * (i + 0.5) / points;
    for (ModeParity parity : {ModeParity::even, ModeParity::odd}) {
      const FrequencyJet a = mode_frequency_jet(q, parity, model);
      const FrequencyJet b = mode_frequency_jet(q + half, parity, model);
      const double tol = 1e-9 * std::abs(a.omega_c - omega_n) + 1e-3;
      out.periodicity = std::max(out.periodicity, std::abs(b.omega_c - a.omega_c) / tol);

      const ld qq = q;
      const ld f_p2 = swing_ld(qq + 2 * h, parity, model), f_p1 = swing_ld(qq + h, parity, model);
      const ld f_0 = swing_ld(qq, parity, model);
      const ld f_m1 = swing_ld(qq - h, parity, model), f_m2 = swing_ld(qq - 2 * h, parity, model);
      const double fd1 = static_cast<double>((-f_p2 + 8 * f_p1 - 8 * f_m1 + f_m2) / (12 * h));
      const double fd2 = static_cast<double>((-f_p2 + 16 * f_p1 - 30 * f_0 + 16 * f_m1 - f_m2) / (12 * h * h));
      out.d1_rel = std::max(out.d1_rel, std::abs(a.d1 - fd1) / std::max(std::abs(a.d1), 1e-2 * d1_scale));
      out.d2_rel = std::max(out.d2_rel, std::abs(a.d2 - fd2) / std::max(std::abs(a.d2), 1e-2 * d2_scale));
    }
    const FrequencyJet e = mode_frequency_jet(q, ModeParity::even, model);
    const FrequencyJet o = mode_frequency_jet(q, ModeParity::odd, model);
    const ld sum = static_cast<ld>(e.omega_c) + static_cast<ld>(o.omega_c);
    const double tol = 1e-9 * static_cast<double>(std::abs(parity_sum - 2.0L * omega_n)) + 1e-3;
    out.parity_sum = std::max(out.parity_sum, static_cast<double>(std::abs(sum - parity_sum)) / tol);

    const ld ref = omega_ld(q, model.params.parity, model) - omega_l;
    out.cancellation = std::max(out.cancellation, static_cast<double>(std::abs(detuning(q, model) - ref)));
  }
  return out;
}

double lorentzian_oracle(const Model& model, int count, double span, double settle) {
  const double kappa = model.params.kappa;
  const double alpha_l = model.scales.alpha_L;
  IntegrationConfig cfg = IntegrationConfig::defaults_for(model);
  cfg.duration = settle / kappa;
  cfg.sample_stride = static_cast<int>(cfg.step_count());

  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double target = count == 1 ? 0.0 : span * kappa * (-1.0 + 2.0 * i / (count - 1));
    const double q = position_for_detuning(model, target);
    const double delta = detuning(q, model);
    ClassicalState start{0.0, q, 0.0, {0.0, 0.0}};
    const Trajectory traj = simulate(start, model, cfg, true);
    const double expected = alpha_l * alpha_l / (kappa * kappa + delta * delta);
    worst = std::max(worst, std::abs(traj.samples.back().photon_number() / expected - 1.0));
  }
  return worst;
}

double damped_decay_oracle(const Model& model, double d, double periods) {
  const Model undriven = model.with_power(0.0);
  IntegrationConfig cfg = IntegrationConfig::defaults_for(undriven, periods);
  const Trajectory traj = simulate(resting_state(undriven, d), undriven, cfg);
  const double gamma = undriven.params.gamma;
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double envelope = d * std::exp(-0.5 * gamma * s.t);
    worst = std::max(worst, std::abs(phase_space_amplitude(s, undriven.params) / envelope - 1.0));
  }
  return worst;
}

double stationarity_oracle(const Model& model, double gamma_times) {
  const Model undriven = model.with_power(0.0);
  CoSimConfig cfg;
  cfg.dt = kDefaultStiffnessGuard / undriven.params.kappa;
  cfg.duration = gamma_times / undriven.params.gamma;
  cfg.sample_stride = 4096;
  const CovarianceMatrix v0 = initial_covariance(undriven.scales);
  const auto samples = cosimulate(resting_state(undriven, 0.0), v0, undriven, cfg);
  // Entry (i, j) is measured against sqrt(V0_ii V0_jj).
  const Eigen::Vector4d sd = v0.matrix().diagonal().cwiseSqrt();
  const Matrix4 scale = sd * sd.transpose();
  double worst = 0.0;
  for (const auto& s : samples) {
    worst = std::max(worst, (s.covariance.matrix() - v0.matrix()).cwiseAbs().cwiseQuotient(scale).maxCoeff());
  }
  return worst;
}

double tmsv_oracle() {
  double worst = 0.0;
  for (double r : {0.1, 0.5, 1.0}) {
    worst = std::max(worst, std::abs(log_negativity(tmsv_covariance(r)).log_negativity - 2.0 * r));
  }
  return worst;
}

std::vector<CheckResult> run_validation_suite(const Model& model, const IntegrationConfig& integration,
                                              const RunPolicy& policy) {
  std::vector<CheckResult> out;
  const double lambda = model.scales.lambda_n;

  LandscapeCheck land;
  out.push_back(timed("mode landscape: periodicity", [&](CheckResult& r) {
    land = check_landscape(model);
    r.passed = land.periodicity <= 1.0;
    r.detail = fmt("worst deviation / tolerance = %.3g", land.periodicity);
  }));
  out.push_back(timed("mode landscape: parity sum", [&](CheckResult& r) {
    r.passed = land.parity_sum <= 1.0;
    r.detail = fmt("worst deviation / tolerance = %.3g", land.parity_sum);
  }));
  out.push_back(timed("mode landscape: derivatives vs finite differences", [&](CheckResult& r) {
    r.passed = land.d1_rel <= 1e-6 && land.d2_rel <= 1e-6;
    r.detail = fmt("d1 rel %.3g, d2 rel %.3g (limit 1e-6)", land.d1_rel, land.d2_rel);
  }));
  out.push_back(timed("detuning: cancelled form vs direct difference", [&](CheckResult& r) {
    r.passed = land.cancellation <= 1.0;
    r.detail = fmt("worst |difference| = %.3g rad/s (limit 1)", land.cancellation);
  }));
  out.push_back(timed("clamped cavity: Lorentzian steady state", [&](CheckResult& r) {
    const double worst = lorentzian_oracle(model);
    r.passed = worst <= 1e-6;
    r.detail = fmt("worst relative error %.3g (limit 1e-6)", worst);
  }));
  out.push_back(timed("undriven membrane: exp(-gamma t/2) envelope", [&](CheckResult& r) {
    const double worst = damped_decay_oracle(model, 0.5 * lambda);
    r.passed = worst <= 1e-2;
    r.detail = fmt("worst relative error %.3g over 10 periods (limit 1e-2)", worst);
  }));
  out.push_back(timed("covariance: thermal x vacuum stationarity", [&](CheckResult& r) {
    const double worst = stationarity_oracle(model);
    r.passed = worst <= 1e-6;
    r.detail = fmt("worst relative drift %.3g over 50/gamma (limit 1e-6)", worst);
  }));
  out.push_back(timed("log-negativity: two-mode squeezed states", [&](CheckResult& r) {
    const double worst = tmsv_oracle();
    const double vac = log_negativity(tmsv_covariance(0.0)).log_negativity;
    const double th = log_negativity(initial_covariance(model.scales)).log_negativity;
    r.passed = worst <= 1e-9 && vac == 0.0 && th == 0.0;
    r.detail = fmt("worst |E_N - 2r| = %.3g; vacuum/thermal E_N = %g", worst, std::max(vac, th));
  }));
  out.push_back(timed("limit cycle: radiation work vs dissipation", [&](CheckResult& r) {
    if (model.params.power <= 0) {
      r.passed = true;
      r.detail = "not applicable at zero power";
      return;
    }
    const AttractorRecord rec = run_to_attractor(0.3 * lambda, model.params.power, model, integration, policy);
    if (!rec.stats.converged || rec.stats.period_estimate == 0.0) {
      r.passed = false;
      r.detail = "orbit from 0.3 lambda_n did not settle on a limit cycle";
      return;
    }
    const EnergyBalance eb = energy_balance(rec.final_state, model.with_power(model.params.power), integration.dt);
    r.passed = std::abs(eb.relative_mismatch()) <= 1e-2;
    r.detail = fmt("relative mismatch %.3g at A_bar = %.4g lambda_n (limit 1e-2)", eb.relative_mismatch(),
                   rec.stats.a_bar / lambda);
  }));
  return out;
}

void print_results(const std::vector<CheckResult>& results, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%7.2fs", r.seconds);
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ') << secs << "  "
        << r.detail << '\n';
  }
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace omsim
