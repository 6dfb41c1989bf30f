#pragma once

// Adaptive integration of the modified Prufer system
//
//   theta'  = (V/eta) (cos(eta x + 2 theta) - 1)
//   (logR)' = (V/eta) sin(eta x + 2 theta)
//
// of the equivalent second-order equation -u'' + V u = E u (cross-check
// oracle), and of the construction system that couples in the aggregate
// phase xi' = -2 Re(Lambda x^{-(p-1)gamma} e^{i(xi + 2 theta)}).
//
// Method: Dormand-Prince 5(4) with PI step control. theta is integrated as a
// continuous lift (never reduced mod 2pi) and logR instead of R. Step sizes
// are capped at a fraction of the shortest oscillation period of the
// right-hand side; the internal per-unit-x error budget is tol^2, which keeps
// the local error well under tol and makes the terminal error shrink faster
// than quadratically in tol (order-scaling property).

#include "wvn/potential.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace wvn {

struct PruferState {
  double x = 0;
  double theta = 0;
  double logR = 0;
  double xi = 0;  // meaningful only in construction mode
};

struct SolutionState {
  double x = 0;
  double u = 0;
  double du = 0;
};

struct Trajectory {
  double E = 0;
  double eta = 0;  // 2 sqrt(E)
  bool construction_mode = false;
  std::vector<PruferState> samples;  // at the requested mesh, increasing x
  double sup_logR = 0;               // over accepted steps, not just samples
  long accepted = 0;
  long rejected = 0;
};

struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
  double tol = 1e-6;          // local error per unit x is kept below tol^2
  double max_frequency = 1;   // fastest angular frequency on the RHS
  double period_fraction = 0.05;  // h <= fraction * (2 pi / max_frequency)
  // +1 locks psi onto the decaying branch; -1 flips the xi coupling so the
  // stable branch is the growing one (control runs)
  double lock_sign = 1;
};

/// Fastest angular frequency appearing in the Prufer RHS for a potential
/// with cosine frequencies alphas at energy eta^2/4.
double prufer_max_frequency(double eta, const std::vector<Rational>& alphas);

/// Log-spaced output mesh with `n` points from x_lo to x_hi inclusive.
std::vector<double> log_mesh(double x_lo, double x_hi, int n);

/// Output mesh for construction runs: log-spaced body plus a linear tail
/// over [x_hi/4, x_hi] dense enough to resolve the fastest oscillation
/// (several samples per period), so tail averages of psi are unbiased.
std::vector<double> construction_mesh(double x_lo, double x_hi,
                                      double max_frequency);

/// Adaptive solve of the Prufer system; x_range may be decreasing (backward
/// integration). `mesh` must be monotone in the direction of integration and
/// contained in [min, max] of the range.
Trajectory integrate_prufer(const std::function<double(double)>& V, double E,
                            double theta0, double logR0, double x_lo, double x_hi,
                            const std::vector<double>& mesh,
                            const IntegratorOptions& opts);

/// Direct second-order integration of -u'' + (V - E) u = 0 (oracle).
std::vector<SolutionState> integrate_direct(const std::function<double(double)>& V,
                                            double E, double u0, double du0,
                                            double x_lo, double x_hi,
                                            const std::vector<double>& mesh,
                                            const IntegratorOptions& opts);

/// Coupled (theta, logR, xi) run with V evaluated through the live xi.
Trajectory integrate_coupled_construction(const Potential& V, double theta0,
                                          double xi0, double x_lo, double x_hi,
                                          const std::vector<double>& mesh,
                                          const IntegratorOptions& opts);

/// Realized limit of psi = xi + 2 theta for a given initial xi, estimated as
/// the integral mean over the tail window [x_hi/4, x_hi] (averaging kills the
/// oscillatory O(x^{-gamma}) transient that pollutes the endpoint value).
double realized_psi(const Potential& V, double theta0, double xi0, double x_lo,
                    double x_hi, const IntegratorOptions& opts);

/// Initial xi(x0) whose realized psi limit hits `target` within `angle_tol`.
/// The locking dynamics make almost every xi0 reach the stable branch, so
/// the 16-point circle sweep usually succeeds directly; otherwise a bracket
/// plus bisection is attempted. Throws BracketFailure when neither works
/// (non-generic parameters).
double shoot_psi_initial(const Potential& V, double theta0, double x_lo,
                         double x_hi, double target, double angle_tol,
                         const IntegratorOptions& opts);

/// (u, u') reconstructed from Prufer variables at a sample.
SolutionState prufer_to_solution(const PruferState& s, double eta);

/// CSV with header x,theta,logR,xi,psi at 17 significant digits; xi/psi
/// columns are left empty outside construction mode.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace wvn
