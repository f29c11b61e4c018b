#include <doctest.h>

#include <cmath>
#include <numbers>

#include "omsim/errors.hpp"
#include "omsim/model.hpp"

using namespace omsim;

namespace {

const Model kRef = Model::make(SystemParams{});
constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("derived scales") {
  const auto& s = kRef.scales;
  const auto& p = kRef.params;
  const double hbar = 1.054571817e-34;

  CHECK(s.lambda_n == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(s.q_z == doctest::Approx(std::sqrt(hbar / (5e-14 * 2 * kPi * 1e5))).epsilon(1e-15));
  CHECK(s.q_z == doctest::Approx(5.794e-14).epsilon(1e-3));
  CHECK(s.q_z * s.p_z == doctest::Approx(hbar).epsilon(1e-15));

  // Bose factor evaluated independently (CODATA constants, 1 mK).
  CHECK(s.n_th == doctest::Approx(207.8665912977148).epsilon(1e-12));
  CHECK(kRef.with_temperature(0.0).scales.n_th == 0.0);

  // |alpha_L|^2 = 2 kappa P / (hbar omega_l)
  CHECK(s.alpha_L * s.alpha_L == doctest::Approx(2 * p.kappa * p.power / (hbar * s.omega_l)).epsilon(1e-13));
  CHECK(kRef.with_power(0.0).scales.alpha_L == 0.0);
}

TEST_CASE("parameter validation") {
  SystemParams p;
  p.r_c = 1.0;
  try {
    derive_scales(p);
    FAIL("r_c = 1 accepted");
  } catch (const ParameterError& e) {
    CHECK(e.field() == "r_c");
  }
  p = SystemParams{};
  p.mass = 0;
  CHECK_THROWS_AS(derive_scales(p), ParameterError);
  p = SystemParams{};
  p.gamma = p.omega_m / 5;  // Q_m = 5 at T > 0
  CHECK_THROWS_AS(derive_scales(p), ParameterError);
  p.temperature = 0;
  CHECK_NOTHROW(derive_scales(p));
  CHECK_THROWS_AS(parse_parity("x"), ParameterError);
}

TEST_CASE("mode frequency examples") {
  const auto& s = kRef.scales;
  const double lambda = s.lambda_n;

  CHECK(mode_frequency_jet(0.0, ModeParity::even, kRef).omega_c == s.omega_n);

  const FrequencyJet at_qs = mode_frequency_jet(lambda / 8, ModeParity::odd, kRef);
  const double expected = s.omega_n + kPi * s.c_over_L - s.c_over_L * std::asin(0.8);
  CHECK(std::abs(at_qs.omega_c - expected) <= 1.0);
  CHECK(std::abs(at_qs.d2) <= 1e-6 * s.c_over_L * 0.8 * std::pow(4 * kPi / lambda, 2));
  CHECK(s.omega_l == at_qs.omega_c);

  for (double q : {0.013 * lambda, 0.21 * lambda, 0.377 * lambda}) {
    for (ModeParity parity : {ModeParity::even, ModeParity::odd}) {
      const FrequencyJet a = mode_frequency_jet(q, parity, kRef);
      const FrequencyJet b = mode_frequency_jet(q + lambda / 2, parity, kRef);
      CHECK(std::abs(a.omega_c - b.omega_c) <= 1.0);
      CHECK(a.d1 == doctest::Approx(b.d1).epsilon(1e-9));
      CHECK(a.d2 == doctest::Approx(b.d2).epsilon(1e-9));
    }
  }
}

TEST_CASE("first derivative matches central difference at q_s + lambda/16") {
  const double lambda = kRef.scales.lambda_n;
  const double q = kRef.params.q_s + lambda / 16;
  const double h = lambda * 1e-6;
  // The cancelled detuning carries the same q dependence without the
  // 1e15 rad/s constant.
  const double fd = (detuning(q + h, kRef) - detuning(q - h, kRef)) / (2 * h);
  CHECK(mode_frequency_jet(q, ModeParity::odd, kRef).d1 == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("detuning") {
  const auto& s = kRef.scales;
  const double lambda = s.lambda_n;
  for (int k = -8; k <= 8; ++k) {
    CHECK(std::abs(detuning(kRef.params.q_s + k * lambda / 4, kRef)) <= 1e-3);
  }
  CHECK(detuning(0.0, kRef) == doctest::Approx(-s.c_over_L * std::asin(0.8)).epsilon(1e-12));
  CHECK(max_abs_detuning(kRef) == doctest::Approx(s.c_over_L * std::asin(0.8)).epsilon(1e-12));

  // Explicit drive equal to the resonant value gives the same landscape.
  SystemParams p;
  p.omega_l = s.omega_l;
  const Model explicit_drive = Model::make(p);
  for (double q : {0.0, 0.1 * lambda, 0.33 * lambda}) {
    CHECK(std::abs(detuning(q, explicit_drive) - detuning(q, kRef)) <= 1.0);
  }
  // Even parity flips the sign of the q-dependent part.
  p = SystemParams{};
  p.parity = ModeParity::even;
  CHECK(detuning(0.0, Model::make(p)) == doctest::Approx(s.c_over_L * std::asin(0.8)).epsilon(1e-12));
}

TEST_CASE("resonance half width") {
  const double dq = resonance_half_width(kRef);
  const double q = kRef.params.q_s + dq;
  CHECK(std::abs(detuning(q, kRef)) == doctest::Approx(5 * kRef.params.kappa).epsilon(1e-9));
  CHECK(dq / kRef.scales.lambda_n == doctest::Approx(0.0031274533).epsilon(1e-6));
}

TEST_CASE("single-mode validity") {
  const auto report = check_single_mode_validity(kRef);
  CHECK(report.level == ValidityLevel::pass);
  CHECK(report.ratio < 0.01);
  CHECK(report.drive_in_band);
  const double c_over_L = kRef.scales.c_over_L;
  CHECK(report.mode_gap == doctest::Approx(kPi * c_over_L - 2 * c_over_L * std::asin(0.8)));

  SystemParams p;
  p.r_c = 0.0;
  p.temperature = 0;
  CHECK(check_single_mode_validity(Model::make(p)).mode_gap == doctest::Approx(kPi * c_over_L));

  p = SystemParams{};
  p.kappa = report.mode_gap;
  p.temperature = 0;
  CHECK(check_single_mode_validity(Model::make(p)).level == ValidityLevel::error);
  p.kappa = 0.05 * report.mode_gap;
  CHECK(check_single_mode_validity(Model::make(p)).level == ValidityLevel::warning);
}
