#pragma once

// Quantitative extraction from trajectories: decay-constant fits (power law
// in the critical case gamma = 1/(p-1), stretched exponential below it),
// verification of the phase-locked slope law (logR)' ~ -|Lambda| x^{-(p-1)gamma},
// embedded-eigenvalue detection by backward integration of the decaying
// branch, and sup-logR energy scans.

#include "wvn/integrate.hpp"
#include "wvn/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wvn {

enum class Regime { Critical, Subcritical };

struct AsymptoticsFit {
  Regime regime = Regime::Critical;
  double B = 0;         // fitted decay constant, target |Lambda|
  double A = 0;         // amplitude, > 0
  double theta_inf = 0;
  double psi_inf = 0;   // tail mean; meaningful in construction mode
  double residual = 0;  // RMS of the fit on the log scale
  double window_lo = 0;
  double window_hi = 0;
};

struct WindowTooShort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Regression of logR against -B log x (critical) or
/// -B x^{1-(p-1)gamma}/(1-(p-1)gamma) (subcritical) plus a constant, over the
/// last two decades of the trajectory excluding the final 5%.
AsymptoticsFit fit_decay(const Trajectory& traj, const PotentialSpec& spec);

struct VerifyReport {
  double psi_inf = 0;
  double target_psi = 0;
  double B = 0;
  double Lambda_abs = 0;
  double ratio = 0;           // B / |Lambda|
  double residual = 0;        // fit RMS
  double slope_residual = 0;  // fitted decay exponent of the slope residual
  bool psi_ok = false;        // |psi_inf - target| < 1e-3
  bool B_ok = false;          // ratio within [0.95, 1.05]
  bool slope_ok = false;      // slope residual decays faster than x^{-(p-1)gamma}
  bool all_ok() const { return psi_ok && B_ok && slope_ok; }
};

VerifyReport verify_construction(const PotentialSpec& spec,
                                 const ConstructionPlan& plan,
                                 const Trajectory& traj);

struct EigenvalueSearchConfig {
  int boundary_angle_grid = 360;  // reporting resolution for theta in [0, pi)
  double B_threshold = 0.5;       // critical case: L^2 needs B > 1/2
  double x_max = 1e4;
  double tol = 1e-3;
};

struct EigenvalueResult {
  double theta_boundary = 0;  // in [0, pi)
  AsymptoticsFit fit;
  Trajectory trajectory;  // the backward run, samples in increasing x
};

/// Backward integration of the decaying branch from x_max down to x0, then
/// exact free rotation to x = 0; returns the boundary angle and the decay
/// fit, or nullopt when the critical-case fit fails square integrability.
std::optional<EigenvalueResult> detect_embedded_eigenvalue(
    const PotentialSpec& spec, const ConstructionPlan& plan,
    const EigenvalueSearchConfig& config);

struct ScanPoint {
  double E = 0;
  double sup_logR = 0;
  std::string status;  // "ok" or "step-failure"
};

/// Parallel sup-logR map over an energy grid for a fixed potential.
std::vector<ScanPoint> scan_energies(const std::function<double(double)>& V,
                                     const std::vector<double>& E_grid,
                                     double x_lo, double x_hi,
                                     const std::vector<Rational>& alphas,
                                     double tol);

}  // namespace wvn
