#pragma once

// Gaussian fluctuations around the classical orbit: drift and diffusion
// matrices, covariance propagation and two-mode entanglement diagnostics.
//
// Quadrature basis u = [dq, dp, dx, dy] (membrane position/momentum in units
// of the zero-point spreads, cavity amplitude/phase quadratures). Vacuum
// variance is 1/2.

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "omsim/classical.hpp"

namespace omsim {

using Matrix4 = Eigen::Matrix4d;

struct DriftMatrix {
  Matrix4 a = Matrix4::Zero();
  double detuning = 0;     // rad/s
  double g_x = 0;          // rad/s
  double g_y = 0;          // rad/s
  double omega_eff = 0;    // rad/s, omega_m + q_z^2 omega_c'' |alpha|^2

  double coupling_magnitude() const { return std::hypot(g_x, g_y); }
};

/// Symmetric 4x4 covariance matrix.
class CovarianceMatrix {
 public:
  CovarianceMatrix() : v_(Matrix4::Zero()) {}
  /// Stores (v + v^T) / 2.
  explicit CovarianceMatrix(const Matrix4& v);

  static CovarianceMatrix from_upper(const std::array<double, 10>& upper);
  std::array<double, 10> upper() const;

  const Matrix4& matrix() const { return v_; }
  double operator()(int i, int j) const { return v_(i, j); }

  Eigen::Matrix2d mechanical_block() const { return v_.topLeftCorner<2, 2>(); }
  Eigen::Matrix2d optical_block() const { return v_.bottomRightCorner<2, 2>(); }
  Eigen::Matrix2d correlation_block() const { return v_.topRightCorner<2, 2>(); }

  /// max |V - V^T|.
  double asymmetry() const;

  bool operator==(const CovarianceMatrix& other) const { return v_ == other.v_; }

 private:
  Matrix4 v_;
};

/// D = diag[0, gamma (2 n_th + 1), kappa, kappa].
struct NoiseMatrix {
  Eigen::Vector4d diagonal = Eigen::Vector4d::Zero();

  static NoiseMatrix from_model(const Model& model);
  Matrix4 matrix() const { return diagonal.asDiagonal(); }
};

struct EntanglementSample {
  double t = 0;
  double log_negativity = 0;
  double eta_minus = 0;
  double min_symplectic_eig = 0;
};

DriftMatrix assemble_drift(const ClassicalState& state, const Model& model);

/// A V + V A^T + D.
Matrix4 covariance_rhs(const Matrix4& v, const Matrix4& a, const NoiseMatrix& d);

/// Thermal membrane times vacuum cavity: diag[n_th + 1/2, n_th + 1/2, 1/2, 1/2].
CovarianceMatrix initial_covariance(const DerivedScales& scales);

struct SymplecticSpectrum {
  double nu_minus = 0;
  double nu_plus = 0;
};

/// Throws PhysicalityError if the discriminant is negative beyond roundoff.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& v);

struct LogNegativity {
  double log_negativity = 0;
  double eta_minus = 0;
};

/// Smallest symplectic eigenvalue of the partial transpose and
/// E_N = max(0, -ln(2 eta^-)). Throws PhysicalityError on corrupted input.
LogNegativity log_negativity(const CovarianceMatrix& v);

/// Two-mode squeezed vacuum with squeeze parameter r >= 0.
CovarianceMatrix tmsv_covariance(double r);

inline constexpr double kDriftGuard = 0.05;
inline constexpr double kPhysicalityTolerance = 1e-4;
/// Scale-relative roundoff allowance for negative radicands.
inline constexpr double kRadicandTolerance = 1e-12;

struct CoSimConfig {
  double dt = 0;           // s
  double duration = 0;     // s
  int sample_stride = 32;
  double stiffness_guard = kDefaultStiffnessGuard;  // max kappa * dt
  double drift_guard = kDriftGuard;  // max dt * max(kappa, |Delta|, |G|, Omega_m) per step
  bool zero_coupling = false;        // force G = 0 (decoherence studies)

  /// dt chosen so the drift guard holds anywhere on the q axis.
  static CoSimConfig defaults_for(const Model& model, double periods = 3.0);
  void validate(const Model& model) const;
  std::int64_t step_count() const;
};

struct CoSample {
  ClassicalState classical;
  CovarianceMatrix covariance;
  EntanglementSample entanglement;
};

/// Upper bound of |G| over the orbit, using the resonant intracavity field.
double max_coupling_bound(const Model& model);

/// Joint RK4 of the classical state and the 10 independent entries of V.
/// Throws IntegrationError (non-finite, drift guard) or PhysicalityError
/// (nu^- < 1/2 - kPhysicalityTolerance at a sample).
std::vector<CoSample> cosimulate(const ClassicalState& initial, const CovarianceMatrix& v0, const Model& model,
                                 const CoSimConfig& config);

}  // namespace omsim
