#include "wvn/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace wvn {

namespace {

using std::numbers::pi;

struct LinFit {
  double slope = 0;
  double intercept = 0;
  double rms = 0;
};

LinFit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
  const size_t n = t.size();
  double mt = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double num = 0, den = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  LinFit f;
  f.slope = num / den;
  f.intercept = my - f.slope * mt;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.slope * t[i] + f.intercept);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

// linear interpolation of logR in log x between trajectory samples
double logR_at(const Trajectory& traj, double x) {
  const auto& s = traj.samples;
  auto it = std::lower_bound(s.begin(), s.end(), x,
                             [](const PruferState& a, double v) { return a.x < v; });
  if (it == s.begin()) return it->logR;
  if (it == s.end()) return s.back().logR;
  const auto& b = *it;
  const auto& a = *(it - 1);
  double w = (std::log(x) - std::log(a.x)) / (std::log(b.x) - std::log(a.x));
  return a.logR + w * (b.logR - a.logR);
}

double trapezoid_mean_psi(const Trajectory& traj, double lo, double hi) {
  double acc = 0, w = 0;
  for (size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    if (a.x < lo || b.x > hi) continue;
    double dx = b.x - a.x;
    acc += 0.5 * ((a.xi + 2 * a.theta) + (b.xi + 2 * b.theta)) * dx;
    w += dx;
  }
  return w > 0 ? acc / w : 0;
}

}  // namespace

AsymptoticsFit fit_decay(const Trajectory& traj, const PotentialSpec& spec) {
  if (traj.samples.size() < 10) throw WindowTooShort("fewer than 10 samples");
  AsymptoticsFit fit;
  fit.regime = spec.critical() ? Regime::Critical : Regime::Subcritical;
  double x_max = traj.samples.back().x;
  fit.window_hi = 0.95 * x_max;
  fit.window_lo = fit.window_hi / 100;
  if (traj.samples.front().x > fit.window_lo * 1.0001)
    throw WindowTooShort("trajectory does not span two decades before the tail");

  const double expo = 1 - to_double(spec.gamma) * (spec.p - 1);
  std::vector<double> t, y;
  double theta_acc = 0;
  size_t n_window = 0;
  for (const auto& s : traj.samples) {
    if (s.x < fit.window_lo || s.x > fit.window_hi) continue;
    ++n_window;
    theta_acc += s.theta;
    if (fit.regime == Regime::Critical)
      t.push_back(-std::log(s.x));
    else
      t.push_back(-std::pow(s.x, expo) / expo);
    y.push_back(s.logR);
  }
  if (n_window < 10) throw WindowTooShort("fewer than 10 samples in the fit window");
  auto lf = least_squares(t, y);
  fit.B = lf.slope;
  fit.A = std::exp(lf.intercept);
  fit.residual = lf.rms;
  fit.theta_inf = theta_acc / n_window;
  // average psi only over [x_max/4, window_hi]: construction meshes are
  // dense there, so the oscillatory part cancels instead of aliasing
  if (traj.construction_mode)
    fit.psi_inf =
        trapezoid_mean_psi(traj, std::max(fit.window_lo, x_max / 4), fit.window_hi);
  return fit;
}

VerifyReport verify_construction(const PotentialSpec& spec,
                                 const ConstructionPlan& plan,
                                 const Trajectory& traj) {
  VerifyReport rep;
  auto fit = fit_decay(traj, spec);
  rep.target_psi = plan.target_psi;
  rep.psi_inf = fit.psi_inf;
  rep.B = fit.B;
  rep.Lambda_abs = std::abs(plan.Lambda);
  rep.ratio = rep.B / rep.Lambda_abs;
  rep.residual = fit.residual;
  rep.psi_ok = std::abs(std::remainder(rep.psi_inf - rep.target_psi, 2 * pi)) < 1e-3;
  rep.B_ok = rep.ratio > 0.95 && rep.ratio < 1.05;

  // windowed slope of logR at log-spaced centers; the window of +/-10% in x
  // averages out the oscillatory O(x^{-gamma}) part of (logR)'
  const double beta = to_double(spec.gamma) * (spec.p - 1);
  std::vector<double> lx, lr;
  double c_lo = fit.window_lo * 1.25, c_hi = fit.window_hi / 1.25;
  for (int i = 0; i < 25; ++i) {
    double x = c_lo * std::pow(c_hi / c_lo, i / 24.0);
    double a = 0.9 * x, b = 1.1 * x;
    double slope = (logR_at(traj, b) - logR_at(traj, a)) / (b - a);
    double resid = std::abs(slope + rep.Lambda_abs * std::pow(x, -beta));
    if (resid <= 0) continue;
    lx.push_back(std::log(x));
    lr.push_back(std::log(resid));
  }
  auto lf = least_squares(lx, lr);
  rep.slope_residual = lf.slope;
  rep.slope_ok = lf.slope < -beta - 0.05;
  return rep;
}

std::optional<EigenvalueResult> detect_embedded_eigenvalue(
    const PotentialSpec& spec, const ConstructionPlan& plan,
    const EigenvalueSearchConfig& config) {
  Potential V(spec, plan);
  std::vector<Rational> alphas;
  for (const auto& t : spec.terms) alphas.push_back(t.alpha);
  const double eta = to_double(plan.eta);
  IntegratorOptions opts{config.tol, prufer_max_frequency(eta, alphas), 0.05};

  const double X = config.x_max;
  const double x0 = spec.x0;
  bool dynamic = std::any_of(spec.terms.begin(), spec.terms.end(), [](const auto& t) {
    return t.xi_mode == XiMode::Dynamic;
  });

  // decreasing mesh for the backward run
  auto mesh = construction_mesh(x0, X, opts.max_frequency);
  std::reverse(mesh.begin(), mesh.end());

  Trajectory traj;
  if (dynamic) {
    double xi0 = shoot_psi_initial(V, 0.0, x0, X, plan.target_psi, 1e-4, opts);
    auto fwd = integrate_coupled_construction(V, 0.0, xi0, x0, X, {X}, opts);
    double xi_X = fwd.samples.back().xi;
    double theta_t = (plan.target_psi - xi_X) / 2;
    traj = integrate_coupled_construction(V, theta_t, xi_X, X, x0, mesh, opts);
  } else {
    double xi_frozen = 0;  // aggregate constant phase over the representation
    for (size_t a = 0; a < plan.term_index.size(); ++a)
      xi_frozen += plan.term_sign[a] * spec.terms[plan.term_index[a]].c;
    // psi = 2 theta - xi_frozen for frozen-phase potentials
    double theta_t = (plan.target_psi + xi_frozen) / 2;
    auto Vx = [&](double x) { return V(x, 0.0); };
    traj = integrate_prufer(Vx, to_double(spec.E), theta_t, 0.0, X, x0, mesh, opts);
    traj.construction_mode = false;
  }

  auto fit = fit_decay(traj, spec);
  bool square_integrable = spec.critical() ? (fit.B > config.B_threshold)
                                           : (fit.B > 0);
  if (!square_integrable) return std::nullopt;

  // free rotation from x0 down to 0 (V extended by zero)
  auto at_x0 = prufer_to_solution(traj.samples.front(), eta);
  double k = std::sqrt(to_double(spec.E));
  double u0 = at_x0.u * std::cos(k * x0) - at_x0.du / k * std::sin(k * x0);
  double du0 = at_x0.u * k * std::sin(k * x0) + at_x0.du * std::cos(k * x0);
  double theta_b = std::atan2(u0, du0);
  theta_b = std::fmod(theta_b + 2 * pi, pi);

  EigenvalueResult res;
  res.theta_boundary = theta_b;
  res.fit = fit;
  res.trajectory = std::move(traj);
  return res;
}

std::vector<ScanPoint> scan_energies(const std::function<double(double)>& V,
                                     const std::vector<double>& E_grid,
                                     double x_lo, double x_hi,
                                     const std::vector<Rational>& alphas,
                                     double tol) {
  std::vector<ScanPoint> out(E_grid.size());
  std::atomic<size_t> next{0};
  unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < E_grid.size(); i = next.fetch_add(1)) {
      double E = E_grid[i];
      ScanPoint p;
      p.E = E;
      try {
        double eta = 2 * std::sqrt(E);
        IntegratorOptions opts{tol, prufer_max_frequency(eta, alphas), 0.05};
        auto traj = integrate_prufer(V, E, 0.0, 0.0, x_lo, x_hi, {x_hi}, opts);
        p.sup_logR = traj.sup_logR;
        p.status = "ok";
      } catch (const StepFailure&) {
        p.sup_logR = 0;
        p.status = "step-failure";
      }
      out[i] = std::move(p);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < n_threads && i + 1 < E_grid.size(); ++i)
    pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace wvn
