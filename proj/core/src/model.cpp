#include "omsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omsim/errors.hpp"

namespace omsim {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ParameterError(field, message);
}

double parity_sign(ModeParity parity) { return parity == ModeParity::even ? 1.0 : -1.0; }

// omega_c(q) - asin-term, i.e. the q-independent part of the mode frequency.
long double mode_constant(ModeParity parity, const DerivedScales& s, double r_c) {
  long double base = static_cast<long double>(s.omega_n) -
                     static_cast<long double>(s.c_over_L) * std::asin(static_cast<long double>(r_c));
  if (parity == ModeParity::odd) base += static_cast<long double>(kPi) * s.c_over_L;
  return base;
}

}  // namespace

void PhysicalConstants::validate() const {
  require(std::isfinite(hbar) && hbar > 0, "hbar", "must be > 0");
  require(std::isfinite(k_B) && k_B > 0, "k_B", "must be > 0");
  require(std::isfinite(c) && c > 0, "c", "must be > 0");
}

std::string_view to_string(ModeParity parity) {
  return parity == ModeParity::even ? "even" : "odd";
}

ModeParity parse_parity(std::string_view text) {
  if (text == "even" || text == "e") return ModeParity::even;
  if (text == "odd" || text == "o") return ModeParity::odd;
  throw ParameterError("parity", "expected \"even\" or \"odd\", got \"" + std::string(text) + "\"");
}

void SystemParams::validate() const {
  require(std::isfinite(omega_m) && omega_m > 0, "omega_m", "must be > 0");
  require(std::isfinite(mass) && mass > 0, "mass", "must be > 0");
  require(std::isfinite(gamma) && gamma >= 0, "gamma", "must be >= 0");
  require(std::isfinite(r_c) && r_c >= 0 && r_c < 1, "r_c", "must satisfy 0 <= r_c < 1");
  require(std::isfinite(cavity_length) && cavity_length > 0, "cavity_length", "must be > 0");
  require(mode_order > 0, "mode_order", "must be a positive integer");
  require(std::isfinite(kappa) && kappa > 0, "kappa", "must be > 0");
  require(std::isfinite(q_s), "q_s", "must be finite");
  require(std::isfinite(power) && power >= 0, "power", "must be >= 0");
  require(std::isfinite(temperature) && temperature >= 0, "temperature", "must be >= 0");
  // The Markovian thermal noise model needs a high mechanical Q.
  if (temperature > 0 && gamma > 0) {
    require(omega_m / gamma >= 10.0, "gamma", "mechanical quality omega_m/gamma must be >= 10 when temperature > 0");
  }
  if (omega_l) require(std::isfinite(*omega_l) && *omega_l > 0, "omega_l", "must be > 0");
}

DerivedScales derive_scales(const SystemParams& params, const PhysicalConstants& constants) {
  params.validate();
  constants.validate();

  DerivedScales s;
  s.lambda_n = params.cavity_length / params.mode_order;
  s.c_over_L = constants.c / params.cavity_length;
  s.omega_n = 2.0 * params.mode_order * kPi * s.c_over_L;
  s.q_z = std::sqrt(constants.hbar / (params.mass * params.omega_m));
  s.p_z = std::sqrt(constants.hbar * params.mass * params.omega_m);

  if (params.omega_l) {
    s.omega_l = *params.omega_l;
  } else {
    const double cos_s = std::cos(4.0 * kPi * params.q_s / s.lambda_n);
    s.omega_l = static_cast<double>(
        mode_constant(params.parity, s, params.r_c) +
        parity_sign(params.parity) * s.c_over_L * std::asin(params.r_c * cos_s));
  }

  s.alpha_L = std::sqrt(2.0 * params.kappa * params.power / (constants.hbar * s.omega_l));
  if (params.temperature > 0) {
    s.n_th = 1.0 / std::expm1(constants.hbar * params.omega_m / (constants.k_B * params.temperature));
  }
  return s;
}

Model Model::make(const SystemParams& params, const PhysicalConstants& constants) {
  return Model{params, constants, derive_scales(params, constants)};
}

Model Model::with_power(double p) const {
  SystemParams next = params;
  next.power = p;
  return make(next, constants);
}

Model Model::with_temperature(double t) const {
  SystemParams next = params;
  next.temperature = t;
  return make(next, constants);
}

FrequencyJet mode_frequency_jet(double q, ModeParity parity, const Model& model) {
  const auto& s = model.scales;
  const double r = model.params.r_c;
  const double k = 4.0 * kPi / s.lambda_n;
  const double theta = k * q;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double w = 1.0 - r * r * cos_t * cos_t;

  const double f = std::asin(r * cos_t);
  const double f1 = -r * k * sin_t / std::sqrt(w);
  const double f2 = -r * k * k * (1.0 - r * r) * cos_t / (w * std::sqrt(w));

  const double sign = parity_sign(parity);
  FrequencyJet jet;
  jet.omega_c = static_cast<double>(mode_constant(parity, s, r) + sign * s.c_over_L * f);
  jet.d1 = sign * s.c_over_L * f1;
  jet.d2 = sign * s.c_over_L * f2;
  return jet;
}

double detuning(double q, const Model& model) {
  return detail::ScaledLandscape(model).detuning(q / model.scales.lambda_n);
}

double max_abs_detuning(const Model& model) {
  // detuning spans [offset - swing, offset + swing]
  const double swing = model.scales.c_over_L * std::asin(model.params.r_c);
  return std::abs(detail::ScaledLandscape(model).offset()) + swing;
}

double resonance_half_width(const Model& model, double kappa_multiple) {
  const detail::ScaledLandscape land(model);
  const double target = kappa_multiple * model.params.kappa;
  const double x_s = model.params.q_s / model.scales.lambda_n;

  double best = 0.125;
  for (int k = 0; k < 2; ++k) {
    const double x0 = x_s + 0.25 * k;
    for (double dir : {1.0, -1.0}) {
      // |detuning| grows monotonically away from the resonance point until
      // the next extremum an eighth of a wavelength away.
      double lo = 0.0;
      double hi = 0.125;
      if (std::abs(land.detuning(x0 + dir * hi)) < target) continue;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(land.detuning(x0 + dir * mid)) < target ? lo : hi) = mid;
      }
      best = std::min(best, 0.5 * (lo + hi));
    }
  }
  return best * model.scales.lambda_n;
}

std::string_view to_string(ValidityLevel level) {
  switch (level) {
    case ValidityLevel::pass: return "PASS";
    case ValidityLevel::warning: return "WARNING";
    case ValidityLevel::error: return "ERROR";
  }
  return "?";
}

ValidityReport check_single_mode_validity(const Model& model) {
  const auto& s = model.scales;
  ValidityReport report;
  report.mode_gap = kPi * s.c_over_L - 2.0 * s.c_over_L * std::asin(model.params.r_c);
  report.ratio = model.params.kappa / report.mode_gap;

  // the mode's tuning range must contain the drive frequency
  const double swing = s.c_over_L * std::asin(model.params.r_c);
  const double offset = detail::ScaledLandscape(model).offset();
  report.drive_in_band = offset - swing <= 0.0 && 0.0 <= offset + swing;

  if (report.ratio > kSingleModeErrorRatio) {
    report.level = ValidityLevel::error;
  } else if (report.ratio > kSingleModeWarnRatio) {
    report.level = ValidityLevel::warning;
  }
  std::ostringstream msg;
  msg << "kappa/gap = " << report.ratio << " (gap " << report.mode_gap << " rad/s)";
  if (!report.drive_in_band) msg << "; drive frequency outside the mode's tuning band";
  report.message = msg.str();
  return report;
}

namespace detail {

ScaledLandscape::ScaledLandscape(const Model& model)
    : sign_(parity_sign(model.params.parity)),
      c_over_L_(model.scales.c_over_L),
      r_c_(model.params.r_c),
      one_minus_r2_(1.0 - model.params.r_c * model.params.r_c) {
  const auto& p = model.params;
  const auto& s = model.scales;
  if (p.resonant_drive()) {
    const double cos_s = std::cos(4.0 * kPi * p.q_s / s.lambda_n);
    offset_ = -sign_ * c_over_L_ * std::asin(r_c_ * cos_s);
  } else {
    offset_ = static_cast<double>(mode_constant(p.parity, s, r_c_) - static_cast<long double>(*p.omega_l));
  }
}

ScaledLandscape::Sample ScaledLandscape::at(double x) const {
  constexpr double k = 4.0 * kPi;
  const double theta = k * x;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double w = 1.0 - r_c_ * r_c_ * cos_t * cos_t;
  const double inv_sqrt_w = 1.0 / std::sqrt(w);
  const double a = sign_ * c_over_L_;
  return Sample{
      a * std::asin(r_c_ * cos_t) + offset_,
      -a * r_c_ * k * sin_t * inv_sqrt_w,
      -a * r_c_ * k * k * one_minus_r2_ * cos_t * inv_sqrt_w * inv_sqrt_w * inv_sqrt_w,
  };
}

double ScaledLandscape::detuning(double x) const {
  return sign_ * c_over_L_ * std::asin(r_c_ * std::cos(4.0 * kPi * x)) + offset_;
}

}  // namespace detail

}  // namespace omsim
