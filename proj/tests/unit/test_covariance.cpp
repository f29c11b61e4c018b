#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "omsim/covariance.hpp"
#include "omsim/errors.hpp"

using namespace omsim;

namespace {

const Model kRef = Model::make(SystemParams{});

// Smallest symplectic eigenvalue of the partial transpose, from the spectrum
// of i Omega V~ rather than the invariant formula.
double numeric_eta_minus(const Matrix4& v) {
  Matrix4 p = Matrix4::Identity();
  p(3, 3) = -1;
  const Matrix4 vt = p * v * p;
  Matrix4 omega = Matrix4::Zero();
  omega(0, 1) = omega(2, 3) = 1;
  omega(1, 0) = omega(3, 2) = -1;
  Eigen::EigenSolver<Matrix4> es(omega * vt);
  double best = INFINITY;
  for (int i = 0; i < 4; ++i) best = std::min(best, std::abs(es.eigenvalues()[i]));
  return best;
}

CovarianceMatrix thermal_product(double n_m, double n_c) {
  Matrix4 v = Matrix4::Zero();
  v.diagonal() << n_m + 0.5, n_m + 0.5, n_c + 0.5, n_c + 0.5;
  return CovarianceMatrix(v);
}

}  // namespace

TEST_CASE("drift matrix at rest with an empty cavity") {
  const auto& p = kRef.params;
  const auto d = assemble_drift(ClassicalState{0, p.q_s, 0, {0, 0}}, kRef);
  CHECK(d.g_x == 0.0);
  CHECK(d.g_y == 0.0);
  CHECK(d.omega_eff == p.omega_m);
  CHECK(std::abs(d.detuning) <= 1e-3);
  CHECK(d.a(0, 1) == p.omega_m);
  CHECK(d.a(1, 0) == -p.omega_m);
  CHECK(d.a(1, 1) == -p.gamma);
  CHECK(d.a(2, 2) == -p.kappa);
  CHECK(d.a(3, 3) == -p.kappa);
  CHECK(d.a(0, 0) == 0.0);
}

TEST_CASE("drift matrix matches an element-wise construction") {
  const auto& p = kRef.params;
  const double lambda = kRef.scales.lambda_n;
  const double q_z = kRef.scales.q_z;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uq(0, lambda / 2), ua(-3e4, 3e4);
  for (int n = 0; n < 100; ++n) {
    const ClassicalState s{0, uq(rng), 0, {ua(rng), ua(rng)}};
    const auto d = assemble_drift(s, kRef);

    const double h = lambda * 1e-5;
    const double d1 = (detuning(s.q0 + h, kRef) - detuning(s.q0 - h, kRef)) / (2 * h);
    const double d2 = (detuning(s.q0 + h, kRef) - 2 * detuning(s.q0, kRef) + detuning(s.q0 - h, kRef)) / (h * h);
    const double gx = std::sqrt(2.0) * q_z * d1 * s.alpha.real();
    const double gy = std::sqrt(2.0) * q_z * d1 * s.alpha.imag();
    const double weff = p.omega_m + q_z * q_z * d2 * std::norm(s.alpha);
    const double scale = std::abs(std::sqrt(2.0) * q_z * d1) * 3e4 + 1.0;

    CHECK(std::abs(d.a(1, 2) + gx) <= 1e-6 * scale);
    CHECK(std::abs(d.a(1, 3) + gy) <= 1e-6 * scale);
    CHECK(std::abs(d.a(2, 0) - gy) <= 1e-6 * scale);
    CHECK(std::abs(d.a(3, 0) + gx) <= 1e-6 * scale);
    CHECK(d.a(2, 3) == d.detuning);
    CHECK(d.a(3, 2) == -d.detuning);
    CHECK(d.detuning == detuning(s.q0, kRef));
    CHECK(std::abs(d.a(1, 0) + weff) <= 1e-4 * p.omega_m);
    CHECK(d.a(0, 2) == 0.0);
    CHECK(d.a(0, 3) == 0.0);
    CHECK(d.a(2, 1) == 0.0);
    CHECK(d.a(3, 1) == 0.0);
  }
}

TEST_CASE("covariance right-hand side") {
  const auto& p = kRef.params;
  const auto noise = NoiseMatrix::from_model(kRef);
  const auto a = assemble_drift(ClassicalState{0, p.q_s, 0, {0, 0}}, kRef).a;

  // From V = 0 only the diffusion remains.
  const Matrix4 rhs0 = covariance_rhs(Matrix4::Zero(), a, noise);
  CHECK(rhs0(0, 0) == 0.0);
  CHECK(rhs0(1, 1) == doctest::Approx(2 * p.gamma * (kRef.scales.n_th + 0.5)));
  CHECK(rhs0(2, 2) == p.kappa);
  CHECK(rhs0(3, 3) == p.kappa);

  // Cavity vacuum is stationary for any detuning.
  const Matrix4 rhs = covariance_rhs(initial_covariance(kRef.scales).matrix(), a, noise);
  CHECK(std::abs(rhs(2, 2)) <= 1e-9 * p.kappa);
  CHECK(std::abs(rhs(3, 3)) <= 1e-9 * p.kappa);
  CHECK(rhs == rhs.transpose());
}

TEST_CASE("covariance container") {
  std::array<double, 10> u{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto v = CovarianceMatrix::from_upper(u);
  CHECK(v.upper() == u);
  CHECK(v(3, 0) == 4);
  CHECK(v(2, 1) == 6);
  CHECK(v.asymmetry() == 0.0);
  Matrix4 m = Matrix4::Zero();
  m(0, 1) = 2;
  CHECK(CovarianceMatrix(m)(1, 0) == 1.0);
}

TEST_CASE("symplectic spectrum and log negativity") {
  const auto vac = thermal_product(0, 0);
  CHECK(symplectic_eigenvalues(vac).nu_minus == doctest::Approx(0.5));
  CHECK(log_negativity(vac).log_negativity == 0.0);
  const auto th = thermal_product(kRef.scales.n_th, 0);
  CHECK(log_negativity(th).log_negativity == 0.0);
  CHECK(symplectic_eigenvalues(th).nu_plus == doctest::Approx(kRef.scales.n_th + 0.5));

  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const auto v = tmsv_covariance(r);
    CHECK(v.matrix().determinant() == doctest::Approx(1.0 / 16).epsilon(1e-9));
    CHECK(std::abs(log_negativity(v).log_negativity - 2 * r) <= 1e-9);
    // Both symplectic eigenvalues are 1/2 here; the degenerate root is only
    // good to ~sqrt(roundoff) of the cosh^2(2r) sized invariants.
    CHECK(symplectic_eigenvalues(v).nu_minus == doctest::Approx(0.5).epsilon(1e-4));
  }
  CHECK(tmsv_covariance(0.0) == vac);
  CHECK_THROWS_AS(tmsv_covariance(-1.0), std::invalid_argument);

  Matrix4 bad = Matrix4::Zero();
  bad.diagonal() << 0.1, 0.1, 0.5, 0.5;
  bad(0, 2) = bad(2, 0) = 2.0;
  CHECK_THROWS_AS(log_negativity(CovarianceMatrix(bad)), PhysicalityError);
}

TEST_CASE("eta minus agrees with the spectrum of the partial transpose") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0, 0.4);
  for (int n = 0; n < 200; ++n) {
    // Random physical state: S S^T / 2 for a random symplectic-ish product
    // of squeezers and a beam splitter, plus thermal noise.
    const double r = std::abs(nd(rng)), s1 = nd(rng), s2 = nd(rng), th = nd(rng);
    Matrix4 sq = Matrix4::Identity();
    sq(0, 0) = std::exp(s1);
    sq(1, 1) = std::exp(-s1);
    sq(2, 2) = std::exp(s2);
    sq(3, 3) = std::exp(-s2);
    Matrix4 bs = Matrix4::Zero();
    bs(0, 0) = bs(1, 1) = bs(2, 2) = bs(3, 3) = std::cos(th);
    bs(0, 2) = bs(1, 3) = std::sin(th);
    bs(2, 0) = bs(3, 1) = -std::sin(th);
    const Matrix4 base = tmsv_covariance(r).matrix() + 0.05 * std::abs(nd(rng)) * Matrix4::Identity();
    const Matrix4 v = bs * sq * base * sq.transpose() * bs.transpose();
    const auto ln = log_negativity(CovarianceMatrix(v));
    const double eta = numeric_eta_minus(v);
    CHECK(ln.eta_minus == doctest::Approx(eta).epsilon(1e-8));
    CHECK(ln.log_negativity == doctest::Approx(std::max(0.0, -std::log(2 * eta))).epsilon(1e-7));
  }
}

TEST_CASE("initial covariance") {
  const auto v = initial_covariance(kRef.scales);
  CHECK(v(0, 0) == kRef.scales.n_th + 0.5);
  CHECK(v(1, 1) == kRef.scales.n_th + 0.5);
  CHECK(v(2, 2) == 0.5);
  CHECK(v(0, 2) == 0.0);
}

TEST_CASE("co-simulation without drive") {
  const Model idle = kRef.with_power(0);
  const auto& p = idle.params;
  const ClassicalState rest{0, p.q_s, 0, {0, 0}};

  SUBCASE("classical state stays put") {
    CoSimConfig cfg = CoSimConfig::defaults_for(idle, 0.05);
    const auto out = cosimulate(rest, initial_covariance(idle.scales), idle, cfg);
    REQUIRE(out.size() > 2);
    for (const auto& s : out) {
      CHECK(s.classical.q0 == p.q_s);
      CHECK(s.classical.alpha == std::complex<double>{0, 0});
      CHECK(s.entanglement.log_negativity == 0.0);
    }
  }

  SUBCASE("cavity noise relaxes to vacuum at rate 2 kappa") {
    CoSimConfig cfg = CoSimConfig::defaults_for(idle);
    cfg.duration = 2 / p.kappa;
    cfg.sample_stride = 16;
    Matrix4 v0 = initial_covariance(idle.scales).matrix();
    v0(2, 2) = v0(3, 3) = 2.0;
    const auto out = cosimulate(rest, CovarianceMatrix(v0), idle, cfg);
    for (const auto& s : out) {
      const double expected = 0.5 + 1.5 * std::exp(-2 * p.kappa * s.classical.t);
      CHECK(s.covariance(2, 2) == doctest::Approx(expected).epsilon(1e-8));
      CHECK(s.covariance(3, 3) == doctest::Approx(expected).epsilon(1e-8));
    }
  }

  SUBCASE("a decoupled squeezed pair decoheres monotonically") {
    CoSimConfig cfg = CoSimConfig::defaults_for(idle);
    cfg.duration = 2 / p.kappa;
    cfg.zero_coupling = true;
    const auto out = cosimulate(rest, tmsv_covariance(0.8), idle, cfg);
    CHECK(out.front().entanglement.log_negativity == doctest::Approx(1.6).epsilon(1e-9));
    for (std::size_t i = 1; i < out.size(); ++i) {
      CHECK(out[i].entanglement.log_negativity <= out[i - 1].entanglement.log_negativity);
    }
    CHECK(out.back().entanglement.log_negativity < 0.5);
  }
}

TEST_CASE("driven co-simulation is deterministic and physical") {
  const auto start = resting_state(kRef, 0.3 * kRef.scales.lambda_n);
  CoSimConfig cfg = CoSimConfig::defaults_for(kRef, 0.02);
  const auto a = cosimulate(start, initial_covariance(kRef.scales), kRef, cfg);
  const auto b = cosimulate(start, initial_covariance(kRef.scales), kRef, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].classical == b[i].classical);
    CHECK(a[i].covariance == b[i].covariance);
    CHECK(a[i].entanglement.min_symplectic_eig >= 0.5 - 1e-6);
  }
  CHECK(a.size() == static_cast<std::size_t>(cfg.step_count() / cfg.sample_stride + 1));
}

TEST_CASE("co-simulation guards") {
  const auto start = resting_state(kRef, 0.3 * kRef.scales.lambda_n);
  CoSimConfig cfg = CoSimConfig::defaults_for(kRef, 0.01);
  CHECK(cfg.dt * std::max(kRef.params.kappa, max_abs_detuning(kRef)) <= kDriftGuard);

  CoSimConfig bad = cfg;
  bad.sample_stride = 0;
  CHECK_THROWS_AS(cosimulate(start, initial_covariance(kRef.scales), kRef, bad), ParameterError);

  bad = cfg;
  bad.dt = 0.01 / kRef.params.kappa;  // within the stiffness guard, not the drift guard
  CHECK_THROWS_AS(cosimulate(start, initial_covariance(kRef.scales), kRef, bad), IntegrationError);

  Matrix4 unphysical = Matrix4::Zero();
  unphysical.diagonal() << 0.1, 0.1, 0.5, 0.5;
  CHECK_THROWS_AS(cosimulate(start, CovarianceMatrix(unphysical), kRef, cfg), PhysicalityError);
}
