#pragma once

// Cavity-mode frequency landscape of a membrane-in-the-middle cavity and the
// derived scales every other module works in.

#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace omsim {

struct PhysicalConstants {
  double hbar = 1.054571817e-34;  // J s
  double k_B = 1.380649e-23;      // J/K
  double c = 299792458.0;         // m/s

  void validate() const;
  bool operator==(const PhysicalConstants&) const = default;
};

enum class ModeParity { even, odd };

std::string_view to_string(ModeParity parity);
ModeParity parse_parity(std::string_view text);

/// Physical parameters of one run, in SI units. Default values are the
/// reference membrane/cavity set (1000 nm mode, r_c = 0.8, kappa = 50 omega_m).
struct SystemParams {
  double omega_m = 2.0 * std::numbers::pi * 1.0e5;  // rad/s
  double mass = 5.0e-14;                            // kg
  double gamma = 1.0e-2 * omega_m;                  // rad/s
  double r_c = 0.8;
  double cavity_length = 0.06;  // m
  int mode_order = 60000;
  ModeParity parity = ModeParity::odd;
  double kappa = 50.0 * omega_m;              // rad/s
  double q_s = 0.06 / 60000.0 / 8.0;          // m, lambda_n / 8
  double power = 0.21;                        // W
  double temperature = 1.0e-3;                // K
  /// Explicit drive frequency in rad/s. Empty means the drive is resonant
  /// with the selected cavity mode at q_s.
  std::optional<double> omega_l;

  /// Throws ParameterError naming the first invalid field.
  void validate() const;
  bool resonant_drive() const { return !omega_l.has_value(); }
  bool operator==(const SystemParams&) const = default;
};

struct DerivedScales {
  double lambda_n = 0;  // m
  double omega_n = 0;   // rad/s
  double q_z = 0;       // m
  double p_z = 0;       // kg m/s
  double alpha_L = 0;   // 1/s
  double n_th = 0;
  double omega_l = 0;   // rad/s, resolved drive frequency
  double c_over_L = 0;  // rad/s
};

DerivedScales derive_scales(const SystemParams& params,
                            const PhysicalConstants& constants = {});

/// Everything needed to evaluate the equations of motion: parameters,
/// constants and the scales derived from them. Built once per run.
struct Model {
  SystemParams params;
  PhysicalConstants constants;
  DerivedScales scales;

  static Model make(const SystemParams& params, const PhysicalConstants& constants = {});
  Model with_power(double power) const;
  Model with_temperature(double temperature) const;
  double mechanical_period() const { return 2.0 * std::numbers::pi / params.omega_m; }
};

/// omega_c(q) and its first two derivatives with respect to q.
struct FrequencyJet {
  double omega_c = 0;  // rad/s
  double d1 = 0;       // rad/(s m)
  double d2 = 0;       // rad/(s m^2)
};

FrequencyJet mode_frequency_jet(double q, ModeParity parity, const Model& model);

/// omega_c(q) - omega_l for the configured parity, evaluated without ever
/// subtracting the two ~1e15 rad/s absolute frequencies.
double detuning(double q, const Model& model);

/// Largest |detuning| reachable anywhere on the q axis.
double max_abs_detuning(const Model& model);

/// Position-space offset from a resonance point q_s + k lambda_n / 4 at which
/// |detuning| reaches `kappa_multiple` * kappa. Minimum over both sides of the
/// two inequivalent resonance points.
double resonance_half_width(const Model& model, double kappa_multiple = 5.0);

enum class ValidityLevel { pass, warning, error };

std::string_view to_string(ValidityLevel level);

struct ValidityReport {
  double mode_gap = 0;  // rad/s, pi c/L - 2 c/L asin(r_c)
  double ratio = 0;     // kappa / mode_gap
  bool drive_in_band = false;
  ValidityLevel level = ValidityLevel::pass;
  std::string message;
};

inline constexpr double kSingleModeWarnRatio = 0.01;
inline constexpr double kSingleModeErrorRatio = 0.1;

ValidityReport check_single_mode_validity(const Model& model);

namespace detail {

/// Frequency landscape in wavelength units: x = q / lambda_n. Derivatives are
/// with respect to x. Hot path for the integrators.
class ScaledLandscape {
 public:
  explicit ScaledLandscape(const Model& model);

  struct Sample {
    double detuning;  // rad/s
    double d1;        // rad/s per lambda_n
    double d2;        // rad/s per lambda_n^2
  };

  Sample at(double x) const;
  double detuning(double x) const;
  double offset() const { return offset_; }

 private:
  double sign_;       // +1 even, -1 odd
  double c_over_L_;
  double r_c_;
  double one_minus_r2_;
  double offset_;     // constant part of the detuning
};

}  // namespace detail

}  // namespace omsim
