#include "omsim/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "omsim/errors.hpp"

namespace omsim {

namespace {

constexpr std::array<std::pair<int, int>, 10> kUpper{{
    {0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3},
}};

Matrix4 drift_layout(double omega_m, double gamma, double kappa, double detuning, double g_x, double g_y,
                     double omega_eff) {
  Matrix4 a;
  a << 0.0, omega_m, 0.0, 0.0,
       -omega_eff, -gamma, -g_x, -g_y,
       g_y, 0.0, -kappa, detuning,
       -g_x, 0.0, -detuning, -kappa;
  return a;
}

// Clamp small negative radicands; reject large ones.
double checked_radicand(double value, double scale, const char* what) {
  if (value >= 0.0) return value;
  if (value < -kRadicandTolerance * std::max(1.0, scale)) {
    std::ostringstream os;
    os << what << " radicand " << value << " is negative beyond roundoff";
    throw PhysicalityError(os.str(), 0.0);
  }
  return 0.0;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(const Matrix4& v) : v_(0.5 * (v + v.transpose())) {}

CovarianceMatrix CovarianceMatrix::from_upper(const std::array<double, 10>& upper) {
  CovarianceMatrix out;
  for (std::size_t k = 0; k < kUpper.size(); ++k) {
    const auto [i, j] = kUpper[k];
    out.v_(i, j) = upper[k];
    out.v_(j, i) = upper[k];
  }
  return out;
}

std::array<double, 10> CovarianceMatrix::upper() const {
  std::array<double, 10> out{};
  for (std::size_t k = 0; k < kUpper.size(); ++k) out[k] = v_(kUpper[k].first, kUpper[k].second);
  return out;
}

double CovarianceMatrix::asymmetry() const { return (v_ - v_.transpose()).cwiseAbs().maxCoeff(); }

NoiseMatrix NoiseMatrix::from_model(const Model& model) {
  const auto& p = model.params;
  NoiseMatrix d;
  d.diagonal << 0.0, p.gamma * (2.0 * model.scales.n_th + 1.0), p.kappa, p.kappa;
  return d;
}

DriftMatrix assemble_drift(const ClassicalState& state, const Model& model) {
  const auto& p = model.params;
  const double q_z = model.scales.q_z;
  const FrequencyJet jet = mode_frequency_jet(state.q0, p.parity, model);

  DriftMatrix d;
  d.detuning = detuning(state.q0, model);
  const std::complex<double> g = std::numbers::sqrt2 * q_z * jet.d1 * state.alpha;
  d.g_x = g.real();
  d.g_y = g.imag();
  d.omega_eff = p.omega_m + q_z * q_z * jet.d2 * state.photon_number();
  d.a = drift_layout(p.omega_m, p.gamma, p.kappa, d.detuning, d.g_x, d.g_y, d.omega_eff);
  return d;
}

Matrix4 covariance_rhs(const Matrix4& v, const Matrix4& a, const NoiseMatrix& d) {
  Matrix4 out = a * v + v * a.transpose();
  out.diagonal() += d.diagonal;
  return out;
}

CovarianceMatrix initial_covariance(const DerivedScales& scales) {
  const double m = scales.n_th + 0.5;
  return CovarianceMatrix(Eigen::Vector4d(m, m, 0.5, 0.5).asDiagonal().toDenseMatrix());
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& v) {
  const double det_a = v.mechanical_block().determinant();
  const double det_b = v.optical_block().determinant();
  const double det_c = v.correlation_block().determinant();
  const double det_v = v.matrix().determinant();
  const double delta = det_a + det_b + 2.0 * det_c;
  const double disc = checked_radicand(delta * delta - 4.0 * det_v, delta * delta, "symplectic");
  const double root = std::sqrt(disc);
  const double nu_plus_sq = 0.5 * (delta + root);
  // nu_-^2 nu_+^2 = det V; the product form avoids cancellation.
  const double nu_minus_sq = nu_plus_sq > 0.0 ? det_v / nu_plus_sq : 0.0;
  return SymplecticSpectrum{std::sqrt(std::max(nu_minus_sq, 0.0)), std::sqrt(std::max(nu_plus_sq, 0.0))};
}

LogNegativity log_negativity(const CovarianceMatrix& v) {
  const double det_a = v.mechanical_block().determinant();
  const double det_b = v.optical_block().determinant();
  const double det_c = v.correlation_block().determinant();
  const double det_v = v.matrix().determinant();
  const double sigma = det_a + det_b - 2.0 * det_c;
  const double disc = checked_radicand(sigma * sigma - 4.0 * det_v, sigma * sigma, "log-negativity");
  // eta^-^2 = (sigma - sqrt(disc)) / 2 = 2 det V / (sigma + sqrt(disc))
  const double denom = sigma + std::sqrt(disc);
  if (!(denom > 0.0)) throw PhysicalityError("log-negativity: non-positive Sigma", 0.0);
  const double eta_sq = checked_radicand(2.0 * det_v / denom, sigma * sigma, "eta^-");
  const double eta = std::sqrt(eta_sq);
  LogNegativity out;
  out.eta_minus = eta;
  out.log_negativity = std::max(0.0, -std::log(2.0 * eta));
  return out;
}

CovarianceMatrix tmsv_covariance(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("tmsv_covariance: r must be >= 0");
  const double c = 0.5 * std::cosh(2.0 * r);
  const double s = 0.5 * std::sinh(2.0 * r);
  Matrix4 v;
  v << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return CovarianceMatrix(v);
}

double max_coupling_bound(const Model& model) {
  const auto& p = model.params;
  const double k = 4.0 * std::numbers::pi / model.scales.lambda_n;
  const double max_slope = model.scales.c_over_L * p.r_c * k;  // |omega_c'| peaks where cos(theta) = 0
  const double max_field = model.scales.alpha_L / p.kappa;
  return std::numbers::sqrt2 * model.scales.q_z * max_slope * max_field;
}

CoSimConfig CoSimConfig::defaults_for(const Model& model, double periods) {
  const double fastest = std::max({model.params.kappa, max_abs_detuning(model), max_coupling_bound(model),
                                   model.params.omega_m});
  CoSimConfig cfg;
  cfg.dt = 0.8 * kDriftGuard / fastest;
  cfg.duration = periods * model.mechanical_period();
  return cfg;
}

void CoSimConfig::validate(const Model& model) const {
  if (!(std::isfinite(dt) && dt > 0)) throw ParameterError("entanglement.dt", "must be > 0");
  if (!(std::isfinite(duration) && duration >= 0)) throw ParameterError("entanglement.duration", "must be >= 0");
  if (sample_stride < 1) throw ParameterError("entanglement.sample_stride", "must be >= 1");
  if (model.params.kappa * dt > stiffness_guard) {
    throw ParameterError("entanglement.dt", "kappa*dt exceeds the stiffness guard");
  }
  if (!(drift_guard > 0)) throw ParameterError("entanglement.drift_guard", "must be > 0");
}

std::int64_t CoSimConfig::step_count() const { return std::llround(duration / dt); }

namespace {

// Joint scaled state: x, y, Re alpha, Im alpha, then the 10 upper entries of V.
using JointVec = StateVec<14>;

class JointSystem {
 public:
  JointSystem(const Model& model, bool zero_coupling)
      : classical_(model), zero_coupling_(zero_coupling) {
    const auto& p = model.params;
    const double inv = 1.0 / p.omega_m;
    inv_omega_m_ = inv;
    gamma_ = p.gamma * inv;
    kappa_ = p.kappa * inv;
    const double qz = model.scales.q_z / model.scales.lambda_n;
    coupling_ = std::numbers::sqrt2 * qz * inv;  // times d omega/dx * alpha
    curvature_ = qz * qz * inv;                  // times d2 omega/dx2 * |alpha|^2
    NoiseMatrix d = NoiseMatrix::from_model(model);
    noise_ = d.diagonal * inv;
  }

  struct Drift {
    Matrix4 a;
    double fastest;  // max(kappa, |Delta|, |G|, Omega_m) in scaled units
  };

  Drift drift(const JointVec& s) const {
    const auto land = classical_.landscape().at(s[0]);
    const double delta = land.detuning * inv_omega_m_;
    double gx = coupling_ * land.d1 * s[2];
    double gy = coupling_ * land.d1 * s[3];
    if (zero_coupling_) gx = gy = 0.0;
    const double omega_eff = 1.0 + curvature_ * land.d2 * (s[2] * s[2] + s[3] * s[3]);
    Drift out{drift_layout(1.0, gamma_, kappa_, delta, gx, gy, omega_eff), 0.0};
    out.fastest = std::max({kappa_, std::abs(delta), std::hypot(gx, gy), std::abs(omega_eff)});
    return out;
  }

  JointVec derivative(const JointVec& s) const {
    const ClassicalSystem::Vec c{s[0], s[1], s[2], s[3]};
    const auto dc = classical_.derivative(c);
    const Matrix4 a = drift(s).a;

    Matrix4 v;
    for (std::size_t k = 0; k < kUpper.size(); ++k) {
      const auto [i, j] = kUpper[k];
      v(i, j) = v(j, i) = s[4 + k];
    }
    Matrix4 dv = a * v + v * a.transpose();
    dv.diagonal() += noise_;

    JointVec out;
    out[0] = dc[0];
    out[1] = dc[1];
    out[2] = dc[2];
    out[3] = dc[3];
    for (std::size_t k = 0; k < kUpper.size(); ++k) out[4 + k] = dv(kUpper[k].first, kUpper[k].second);
    return out;
  }

  const ClassicalSystem& classical() const { return classical_; }

 private:
  ClassicalSystem classical_;
  bool zero_coupling_;
  double inv_omega_m_ = 0;
  double gamma_ = 0;
  double kappa_ = 0;
  double coupling_ = 0;
  double curvature_ = 0;
  Eigen::Vector4d noise_;
};

CoSample make_sample(const JointSystem& sys, const JointVec& s, double t) {
  CoSample out;
  out.classical = sys.classical().from_scaled({s[0], s[1], s[2], s[3]}, t);
  std::array<double, 10> upper{};
  std::copy(s.begin() + 4, s.end(), upper.begin());
  out.covariance = CovarianceMatrix::from_upper(upper);

  try {
    const auto ln = log_negativity(out.covariance);
    const auto spec = symplectic_eigenvalues(out.covariance);
    out.entanglement = EntanglementSample{t, ln.log_negativity, ln.eta_minus, spec.nu_minus};
  } catch (const PhysicalityError& e) {
    throw PhysicalityError(e.what(), t);
  }
  if (out.entanglement.min_symplectic_eig < 0.5 - kPhysicalityTolerance) {
    std::ostringstream os;
    os << "covariance left the physical region: nu^- = " << out.entanglement.min_symplectic_eig << " at t = " << t
       << " s";
    throw PhysicalityError(os.str(), t);
  }
  return out;
}

}  // namespace

std::vector<CoSample> cosimulate(const ClassicalState& initial, const CovarianceMatrix& v0, const Model& model,
                                 const CoSimConfig& config) {
  config.validate(model);
  if (!initial.finite()) throw IntegrationError("non-finite initial state", initial.t);

  const JointSystem sys(model, config.zero_coupling);
  const double h = config.dt * model.params.omega_m;
  const std::int64_t steps = config.step_count();

  JointVec s{};
  const auto c0 = sys.classical().to_scaled(initial);
  std::copy(c0.begin(), c0.end(), s.begin());
  const auto upper = v0.upper();
  std::copy(upper.begin(), upper.end(), s.begin() + 4);

  std::vector<CoSample> out;
  out.reserve(static_cast<std::size_t>(steps / config.sample_stride + 1));
  out.push_back(make_sample(sys, s, initial.t));

  auto f = [&](const JointVec& v) { return sys.derivative(v); };
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double t_prev = initial.t + static_cast<double>(i - 1) * config.dt;
    const double fastest = sys.drift(s).fastest;
    if (h * fastest > config.drift_guard) {
      std::ostringstream os;
      os << "drift step guard violated: dt*max(kappa,|Delta|,|G|,Omega_m) = " << h * fastest << " > "
         << config.drift_guard << " at t = " << t_prev << " s";
      throw IntegrationError(os.str(), t_prev);
    }
    const JointVec next = rk4_advance(s, h, f);
    if (!all_finite(next)) {
      std::ostringstream os;
      os << "non-finite co-simulation step at t = " << t_prev << " s";
      throw IntegrationError(os.str(), t_prev);
    }
    s = next;
    if (i % config.sample_stride == 0) {
      out.push_back(make_sample(sys, s, initial.t + static_cast<double>(i) * config.dt));
    }
  }
  return out;
}

}  // namespace omsim
