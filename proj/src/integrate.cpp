#include "wvn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace wvn {

namespace {

using std::numbers::pi;

constexpr int kMaxDim = 3;

struct Vec {
  double v[kMaxDim] = {0, 0, 0};
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

// Dormand-Prince 5(4) tableau; the 5th-order solution is propagated.
constexpr double kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0, 500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kB4[7] = {5179.0 / 57600,    0,           7571.0 / 16695,
                           393.0 / 640,       -92097.0 / 339200,
                           187.0 / 2100,      1.0 / 40};

// Steps through [x_lo, x_hi] (either direction), calling `observe` after
// every accepted step and `emit` exactly at the mesh points.
template <class Rhs, class Observe, class Emit>
void adaptive_solve(const Rhs& rhs, int dim, Vec y, double x_lo, double x_hi,
                    const std::vector<double>& mesh, const IntegratorOptions& opts,
                    long& accepted, long& rejected, const Observe& observe,
                    const Emit& emit) {
  const double dir = (x_hi >= x_lo) ? 1.0 : -1.0;
  const double span = std::abs(x_hi - x_lo);
  const double tau = opts.tol * opts.tol;
  const double hmax =
      std::min(span > 0 ? span : 1.0,
               opts.period_fraction * 2 * pi / std::max(opts.max_frequency, 1e-12));

  size_t next_mesh = 0;
  auto flush_mesh = [&](double x, const Vec& state) {
    while (next_mesh < mesh.size() &&
           dir * (mesh[next_mesh] - x) <= 1e-9 * std::max(1.0, std::abs(x))) {
      emit(mesh[next_mesh], state);
      ++next_mesh;
    }
  };

  double x = x_lo;
  flush_mesh(x, y);
  if (span == 0) return;

  double h = hmax / 10;
  double err_prev = 1.0;
  while (dir * (x_hi - x) > 1e-12 * std::max(1.0, std::abs(x))) {
    double target = x_hi;
    if (next_mesh < mesh.size() && dir * (mesh[next_mesh] - target) < 0)
      target = mesh[next_mesh];
    double hstep = std::min(h, std::abs(target - x));
    double hs = dir * hstep;

    Vec k[7];
    rhs(x, y, k[0]);
    for (int s = 1; s < 7; ++s) {
      Vec ys = y;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < s; ++j) ys[i] += hs * kA[s][j] * k[j][i];
      rhs(x + kC[s] * hs, ys, k[s]);
    }
    Vec ynew = y;
    double err = 0;
    for (int i = 0; i < dim; ++i) {
      double de = 0;
      for (int s = 0; s < 7; ++s) {
        ynew[i] += hs * kB5[s] * k[s][i];
        de += hs * (kB5[s] - kB4[s]) * k[s][i];
      }
      double sc = hstep * tau * (1 + std::abs(y[i])) + 1e-300;
      err = std::max(err, std::abs(de) / sc);
    }

    if (err <= 1.0) {
      x += hs;
      y = ynew;
      ++accepted;
      observe(x, y);
      flush_mesh(x, y);
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5) *
                   std::pow(err_prev, -0.4 / 5);
      err_prev = std::max(err, 1e-10);
      h = std::min(hmax, hstep * std::clamp(fac, 0.2, 5.0));
    } else {
      ++rejected;
      h = hstep * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
    if (h < 1e-13 * std::max(1.0, std::abs(x)))
      throw StepFailure("step size underflow at x = " + std::to_string(x));
  }
}

}  // namespace

double prufer_max_frequency(double eta, const std::vector<Rational>& alphas) {
  double m = eta;
  double amax = 0;
  for (const auto& a : alphas) amax = std::max(amax, to_double(a));
  return std::max({m, amax, eta + 2 * amax});
}

std::vector<double> log_mesh(double x_lo, double x_hi, int n) {
  std::vector<double> m;
  if (n < 2) {
    m.push_back(x_hi);
    return m;
  }
  double l0 = std::log(x_lo), l1 = std::log(x_hi);
  for (int i = 0; i < n; ++i)
    m.push_back(std::exp(l0 + (l1 - l0) * i / (n - 1)));
  m.front() = x_lo;
  m.back() = x_hi;
  return m;
}

std::vector<double> construction_mesh(double x_lo, double x_hi,
                                      double max_frequency) {
  double tail_lo = std::max(x_lo, x_hi / 4);
  auto mesh = log_mesh(x_lo, tail_lo, 400);
  mesh.pop_back();
  int n = static_cast<int>((x_hi - tail_lo) * max_frequency / (2 * pi) * 6);
  n = std::clamp(n, 200, 200000);
  for (int i = 0; i <= n; ++i)
    mesh.push_back(tail_lo + (x_hi - tail_lo) * i / n);
  return mesh;
}

Trajectory integrate_prufer(const std::function<double(double)>& V, double E,
                            double theta0, double logR0, double x_lo, double x_hi,
                            const std::vector<double>& mesh,
                            const IntegratorOptions& opts) {
  Trajectory traj;
  traj.E = E;
  traj.eta = 2 * std::sqrt(E);
  traj.sup_logR = logR0;
  const double eta = traj.eta;

  auto rhs = [&](double x, const Vec& y, Vec& dy) {
    double v = V(x);
    double phase = eta * x + 2 * y[0];
    dy[0] = v / eta * (std::cos(phase) - 1);
    dy[1] = v / eta * std::sin(phase);
    dy[2] = 0;
  };
  Vec y;
  y[0] = theta0;
  y[1] = logR0;
  double theta_prev = theta0;
  adaptive_solve(
      rhs, 2, y, x_lo, x_hi, mesh, opts, traj.accepted, traj.rejected,
      [&](double x, const Vec& s) {
        if (std::abs(s[0] - theta_prev) > pi)
          throw StepFailure("theta jumped by more than pi at x = " +
                            std::to_string(x));
        theta_prev = s[0];
        traj.sup_logR = std::max(traj.sup_logR, s[1]);
      },
      [&](double x, const Vec& s) {
        traj.samples.push_back({x, s[0], s[1], 0});
      });
  if (x_hi < x_lo) std::reverse(traj.samples.begin(), traj.samples.end());
  return traj;
}

std::vector<SolutionState> integrate_direct(const std::function<double(double)>& V,
                                            double E, double u0, double du0,
                                            double x_lo, double x_hi,
                                            const std::vector<double>& mesh,
                                            const IntegratorOptions& opts) {
  std::vector<SolutionState> out;
  auto rhs = [&](double x, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = (V(x) - E) * y[0];
    dy[2] = 0;
  };
  Vec y;
  y[0] = u0;
  y[1] = du0;
  long acc = 0, rej = 0;
  adaptive_solve(
      rhs, 2, y, x_lo, x_hi, mesh, opts, acc, rej, [](double, const Vec&) {},
      [&](double x, const Vec& s) { out.push_back({x, s[0], s[1]}); });
  if (x_hi < x_lo) std::reverse(out.begin(), out.end());
  return out;
}

Trajectory integrate_coupled_construction(const Potential& V, double theta0,
                                          double xi0, double x_lo, double x_hi,
                                          const std::vector<double>& mesh,
                                          const IntegratorOptions& opts) {
  Trajectory traj;
  traj.E = to_double(V.spec().E);
  traj.eta = to_double(V.plan().eta);
  traj.construction_mode = true;
  traj.sup_logR = 0;
  const double eta = traj.eta;
  const double lambda_abs = std::abs(V.plan().Lambda);
  const double lambda_arg = std::arg(V.plan().Lambda);
  const double beta =
      to_double(V.spec().gamma) * (V.spec().p - 1);  // resonant decay exponent

  auto rhs = [&](double x, const Vec& y, Vec& dy) {
    double v = V(x, y[2]);
    double phase = eta * x + 2 * y[0];
    dy[0] = v / eta * (std::cos(phase) - 1);
    dy[1] = v / eta * std::sin(phase);
    // xi' = -2 Re(Lambda x^{-beta} e^{i psi}); the fixed point at
    // psi = -pi/2 - arg Lambda is the stable one for lock_sign = +1
    dy[2] = -opts.lock_sign * 2 * lambda_abs * std::pow(x, -beta) *
            std::cos(y[2] + 2 * y[0] + lambda_arg);
  };
  Vec y;
  y[0] = theta0;
  y[2] = xi0;
  adaptive_solve(
      rhs, 3, y, x_lo, x_hi, mesh, opts, traj.accepted, traj.rejected,
      [&](double, const Vec& s) {
        traj.sup_logR = std::max(traj.sup_logR, s[1]);
      },
      [&](double x, const Vec& s) {
        traj.samples.push_back({x, s[0], s[1], s[2]});
      });
  if (x_hi < x_lo) std::reverse(traj.samples.begin(), traj.samples.end());
  return traj;
}

double realized_psi(const Potential& V, double theta0, double xi0, double x_lo,
                    double x_hi, const IntegratorOptions& opts) {
  // dense linear mesh over the averaging window, several samples per period
  double lo = x_hi / 4;
  int n = static_cast<int>((x_hi - lo) * opts.max_frequency / (2 * pi) * 6);
  n = std::clamp(n, 200, 200000);
  std::vector<double> mesh;
  mesh.reserve(n + 1);
  for (int i = 0; i <= n; ++i) mesh.push_back(lo + (x_hi - lo) * i / n);
  auto traj = integrate_coupled_construction(V, theta0, xi0, x_lo, x_hi, mesh, opts);
  double acc = 0, w = 0;
  for (size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    double dx = b.x - a.x;
    acc += 0.5 * ((a.xi + 2 * a.theta) + (b.xi + 2 * b.theta)) * dx;
    w += dx;
  }
  return acc / w;
}

namespace {
double wrap_angle(double a) {
  double w = std::fmod(a + pi, 2 * pi);
  if (w < 0) w += 2 * pi;
  return w - pi;
}
}  // namespace

double shoot_psi_initial(const Potential& V, double theta0, double x_lo,
                         double x_hi, double target, double angle_tol,
                         const IntegratorOptions& opts) {
  constexpr int kGrid = 16;
  double d[kGrid];
  double xi[kGrid];
  for (int i = 0; i < kGrid; ++i) {
    xi[i] = 2 * pi * i / kGrid;
    d[i] = wrap_angle(realized_psi(V, theta0, xi[i], x_lo, x_hi, opts) - target);
    // the stable branch attracts almost every initial point, so the sweep
    // normally lands on target without any bisection
    if (std::abs(d[i]) < angle_tol) return xi[i];
  }
  for (int i = 0; i < kGrid; ++i) {
    int j = (i + 1) % kGrid;
    // a usable bracket: sign change without a branch-cut jump
    if (d[i] * d[j] >= 0 || std::abs(d[i] - d[j]) >= pi) continue;
    double lo = xi[i], hi = xi[i] + 2 * pi / kGrid;
    double dlo = d[i];
    for (int it = 0; it < 60; ++it) {
      double mid = (lo + hi) / 2;
      double dm = wrap_angle(realized_psi(V, theta0, mid, x_lo, x_hi, opts) - target);
      if (std::abs(dm) < angle_tol) return wrap_angle(mid - pi) + pi;
      if (dlo * dm <= 0) {
        hi = mid;
      } else {
        lo = mid;
        dlo = dm;
      }
    }
    throw NonConvergence("bisection failed to reach the psi target tolerance");
  }
  throw BracketFailure("no sign change of the realized psi over 16 circle points");
}

SolutionState prufer_to_solution(const PruferState& s, double eta) {
  double r = std::exp(s.logR);
  double arg = eta * s.x / 2 + s.theta;
  return {s.x, r * std::sin(arg), eta / 2 * r * std::cos(arg)};
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "x,theta,logR,xi,psi\n";
  char buf[128];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", s.x, s.theta, s.logR);
    out += buf;
    if (traj.construction_mode) {
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", s.xi, s.xi + 2 * s.theta);
      out += buf;
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace wvn
