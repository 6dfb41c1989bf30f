// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit when
// anything fails. argv[1] is the path to the command-line binary (used by the
// determinism criterion).

#include "wvn/asymptotics.hpp"
#include "wvn/coeff.hpp"
#include "wvn/integrate.hpp"
#include "wvn/phase_sets.hpp"
#include "wvn/potential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace wvn;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& what) {
  std::printf("%s  criterion %2d: %s\n", ok ? "PASS" : "FAIL", idx, what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  return Rational(num(rng), den(rng));
}

PotentialSpec classical_spec() {
  PotentialSpec s;
  s.p = 2;
  s.gamma = 1;
  s.terms = {{8.0, Rational(2), XiMode::Frozen, pi / 2, Rational(64)}};
  s.x0 = 1;
  s.E = 1;
  return s;
}

PotentialSpec p2_dynamic() {
  PotentialSpec s;
  s.p = 2;
  s.gamma = Rational(3, 4);
  s.terms = {{4.0, Rational(2), XiMode::Dynamic, 1.0, std::nullopt}};
  s.x0 = 1;
  s.E = 1;
  return s;
}

struct LinFit {
  double slope = 0, intercept = 0, rms = 0;
};

LinFit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
  double mt = 0, my = 0;
  const size_t n = t.size();
  for (size_t i = 0; i < n; ++i) mt += t[i], my += y[i];
  mt /= n;
  my /= n;
  double num = 0, den = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  LinFit f{num / den, 0, 0};
  f.intercept = my - f.slope * mt;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.slope * t[i] + f.intercept);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

// ---------------------------------------------------------------- criterion 1
void criterion_identities() {
  double t_start = now_seconds();
  bool ok = true;
  std::ostringstream what;
  for (int I = 2; I <= 5 && ok; ++I)
    for (int K = 2; K <= I && ok; ++K)
      for (int k = 1; k < K && ok; ++k) {
        auto rep = check_convolution_identities(I, K, k, 100, 1000 * I + 10 * K + k);
        if (!rep.ok() || rep.checked < 100) {
          ok = false;
          what << "convolution identity failed at I=" << I << " K=" << K
               << " k=" << k << "; ";
        }
      }
  // reflection symmetry of F_{I,0} under phi -> -phi when the phases sum to 0
  std::mt19937_64 rng(17);
  CoeffEngine engine(6);
  for (int I = 2; I <= 5 && ok; ++I) {
    int done = 0, attempts = 0;
    while (done < 100 && attempts < 10000) {
      ++attempts;
      EvalPoint p;
      p.eta = random_rational(rng);
      Rational sum = 0;
      for (int i = 0; i + 1 < I; ++i) {
        p.phis.push_back(random_rational(rng));
        sum += p.phis.back();
      }
      p.phis.push_back(-sum);
      auto a = engine.eval_F({I, 0}, p);
      EvalPoint q = p;
      for (auto& phi : q.phis) phi = -phi;
      auto b = engine.eval_F({I, 0}, q);
      if (!a.finite || !b.finite) continue;
      if (a.value != b.value) {
        ok = false;
        what << "reflection symmetry violated at I=" << I << "; ";
        break;
      }
      ++done;
    }
    if (done < 100 && ok) {
      ok = false;
      what << "too few pole-free reflection points at I=" << I << "; ";
    }
  }
  double elapsed = now_seconds() - t_start;
  if (elapsed > 120) {
    ok = false;
    what << "runtime " << elapsed << "s exceeds 120s; ";
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "exact identity suite, 100 pts per (I,K,k), I<=5 (%.1fs)", elapsed);
  report(1, ok, ok ? buf : what.str());
}

// ---------------------------------------------------------------- criterion 2
void criterion_oracle() {
  std::mt19937_64 rng(23);
  CoeffEngine engine(6);
  bool ok = true;
  for (int I = 1; I <= 5 && ok; ++I) {
    int done = 0, attempts = 0;
    while (done < 20 && attempts < 5000) {
      ++attempts;
      EvalPoint p;
      p.eta = random_rational(rng);
      for (int i = 0; i < I; ++i) p.phis.push_back(random_rational(rng));
      auto h = engine.eval_H_expansion(I, p);
      auto f = engine.eval_F({I, 0}, p);
      if (!h.finite || !f.finite) continue;
      if (h.value != f.value) {
        ok = false;
        break;
      }
      ++done;
    }
    if (done < 20) ok = false;
  }
  report(2, ok, "lattice-path oracle equals recursive F_{I,0}, I<=5, 20 pts each");
}

// ---------------------------------------------------------------- criterion 3
void criterion_base_cases() {
  CoeffEngine engine(3);
  EvalPoint p1{Rational(7, 3), {Rational(1)}};
  auto f10 = engine.eval_f({1, 0}, p1);
  auto f11 = engine.eval_f({1, 1}, p1);
  EvalPoint p2{Rational(3), {Rational(-2), Rational(5)}};
  auto f21 = engine.eval_f({2, 1}, p2);
  bool ok = f10.finite && f10.value == Rational(-3, 7) && f11.finite &&
            f11.value == Rational(3, 7) && f21.finite &&
            f21.value == Rational(-1, 30);
  report(3, ok, "base cases f_{1,0} = -1/eta, f_{1,1} = 1/eta, f_{2,1}(3;-2,5) = -1/30");
}

// ---------------------------------------------------------------- criterion 4
void criterion_pole_containment() {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> Idist(1, 4), num(1, 9), den(1, 9);
  CoeffEngine engine(5);
  bool ok = true;
  for (int probe = 0; probe < 10000 && ok; ++probe) {
    int I = Idist(rng);
    std::uniform_int_distribution<int> Kdist(0, I);
    int K = Kdist(rng);
    EvalPoint p;
    p.eta = Rational(num(rng), den(rng));  // eta > 0
    for (int i = 0; i < I; ++i) p.phis.push_back(random_rational(rng));
    auto F = engine.eval_F({I, K}, p);
    auto G = engine.eval_G({I, K}, p);
    if (!F.finite && !CoeffEngine::singularity_support_F({I, K}, p)) ok = false;
    if (!G.finite && !CoeffEngine::singularity_support_G({I, K}, p)) ok = false;
  }
  report(4, ok, "10^4 probes: non-finite values only on the predicted locus");
}

// ---------------------------------------------------------------- criterion 5
void criterion_integrator() {
  auto V = [](double x) { return x >= 1 ? -8 * std::sin(2 * x) / x : 0.0; };
  const double E = 1, eta = 2;
  auto mesh = log_mesh(1, 1000, 60);
  IntegratorOptions opts{1e-4, prufer_max_frequency(eta, {Rational(2)}), 0.05};
  auto traj = integrate_prufer(V, E, 0.3, 0.0, 1, 1000, mesh, opts);
  auto s0 = prufer_to_solution(traj.samples.front(), eta);
  auto direct = integrate_direct(V, E, s0.u, s0.du, 1, 1000, mesh, opts);
  bool agree = true;
  for (size_t i = 0; i < mesh.size(); ++i) {
    double Rp = std::exp(traj.samples[i].logR);
    double u = direct[i].u, du = direct[i].du;
    double Rd = std::sqrt(u * u + (2 * du / eta) * (2 * du / eta));
    if (std::abs(Rp - Rd) / Rd > 1e-6) agree = false;
  }

  // order scaling: in the tolerance-limited regime (relaxed frequency cap),
  // halving tol must shrink the terminal error at least 4x
  IntegratorOptions ref_opts{3e-6, 6.0, 0.5};
  std::vector<double> end_mesh{100.0};
  auto dref = integrate_direct(V, E, 0.0, 1.0, 1, 100, end_mesh, ref_opts);
  auto err_at = [&](double tol) {
    IntegratorOptions o{tol, 6.0, 0.5};
    auto s = integrate_direct(V, E, 0.0, 1.0, 1, 100, end_mesh, o);
    return std::hypot(s.back().u - dref.back().u, s.back().du - dref.back().du);
  };
  double prev_err = err_at(2e-3);
  bool scaling = true;
  for (double tol : {1e-3, 5e-4}) {
    double err = err_at(tol);
    if (!(prev_err / err >= 4.0)) scaling = false;
    prev_err = err;
  }
  report(5, agree && scaling,
         "Prufer vs direct 1e-6 over [1,1e3]; tol halving shrinks error >= 4x");
}

// ---------------------------------------------------------------- criterion 6
void criterion_classical() {
  auto spec = classical_spec();
  auto plan = plan_construction(spec);
  EigenvalueSearchConfig cfg;
  cfg.x_max = 1e4;
  auto res = detect_embedded_eigenvalue(spec, plan, cfg);
  bool ok = res.has_value() && res->fit.B > 0.5;
  if (ok) {
    // independent oracle: direct second-order integration of the detected
    // solution, run backward from x = 1000 (the decaying branch is stable in
    // that direction; forward it is swamped by the growing branch), then a
    // log-log amplitude regression
    auto V = [](double x) { return x >= 1 ? -8 * std::sin(2 * x) / x : 0.0; };
    const auto& samples = res->trajectory.samples;
    auto it = std::lower_bound(
        samples.begin(), samples.end(), 1000.0,
        [](const PruferState& a, double v) { return a.x < v; });
    auto s1 = prufer_to_solution(*it, 2.0);
    auto mesh = log_mesh(1, it->x, 200);
    std::reverse(mesh.begin(), mesh.end());
    IntegratorOptions opts{1e-4, prufer_max_frequency(2.0, {Rational(2)}), 0.05};
    auto direct = integrate_direct(V, 1.0, s1.u, s1.du, it->x, 1, mesh, opts);
    std::vector<double> t, y;
    for (const auto& s : direct) {
      if (s.x < 10 || s.x > 950) continue;
      t.push_back(-std::log(s.x));
      y.push_back(0.5 * std::log(s.u * s.u + s.du * s.du));
    }
    double B_direct = least_squares(t, y).slope;
    ok = std::abs(res->fit.B / B_direct - 1) < 0.1;
  }

  // off-resonance energies: sup logR gains < 0.1 between decades
  bool bounded = true;
  auto V = [](double x) { return x >= 1 ? -8 * std::sin(2 * x) / x : 0.0; };
  for (double E : {0.5, 2.0, 3.0}) {
    IntegratorOptions opts{1e-3, prufer_max_frequency(2 * std::sqrt(E), {Rational(2)}),
                           0.05};
    auto leg1 = integrate_prufer(V, E, 0.0, 0.0, 1, 100, {100.0}, opts);
    const auto& e1 = leg1.samples.back();
    auto leg2 = integrate_prufer(V, E, e1.theta, e1.logR, 100, 1000, {1000.0}, opts);
    const auto& e2 = leg2.samples.back();
    auto leg3 =
        integrate_prufer(V, E, e2.theta, e2.logR, 1000, 10000, {10000.0}, opts);
    if (leg3.sup_logR - leg2.sup_logR >= 0.1) bounded = false;
  }
  report(6, ok && bounded,
         "classical E=1 decaying solution, B > 1/2 within 10% of the direct "
         "oracle; off-resonance sup logR flat");
}

// ---------------------------------------------------------------- criterion 7
void criterion_p2_pipeline() {
  auto spec = p2_dynamic();
  auto plan = plan_construction(spec);
  Potential V(spec, plan);
  IntegratorOptions opts{1e-3, prufer_max_frequency(2.0, {Rational(2)}), 0.05};
  const double X = 4000;
  double xi0 = shoot_psi_initial(V, 0.0, 1.0, X, plan.target_psi, 1e-4, opts);
  auto mesh = construction_mesh(1.0, X, opts.max_frequency);
  auto traj = integrate_coupled_construction(V, 0.0, xi0, 1.0, X, mesh, opts);
  auto fit = fit_decay(traj, spec);
  bool psi_ok =
      std::abs(std::remainder(fit.psi_inf - plan.target_psi, 2 * pi)) < 1e-3;
  bool B_ok = std::abs(fit.B / std::abs(plan.Lambda) - 1) < 0.05;

  // psi-convergence envelope: bin maxima of |psi - psi_inf| over log-spaced
  // bins, then a log-log fit. The measured envelope decays like x^{-gamma},
  // faster than the x^{1-p gamma} bound, so the fitted slope must sit at or
  // below -0.5 + 0.15.
  const int n_bins = 10;
  std::vector<double> bx(n_bins, 0), bm(n_bins, 0);
  double lo = 10, hi = 1000;
  for (const auto& s : traj.samples) {
    if (s.x < lo || s.x > hi) continue;
    int b = std::min(n_bins - 1, static_cast<int>(n_bins * std::log(s.x / lo) /
                                                  std::log(hi / lo)));
    double dev = std::abs(std::remainder(s.xi + 2 * s.theta - fit.psi_inf, 2 * pi));
    if (dev > bm[b]) bm[b] = dev;
    bx[b] = lo * std::pow(hi / lo, (b + 0.5) / n_bins);
  }
  std::vector<double> t, y;
  for (int b = 0; b < n_bins; ++b)
    if (bm[b] > 0) {
      t.push_back(std::log(bx[b]));
      y.push_back(std::log(bm[b]));
    }
  double slope = least_squares(t, y).slope;
  bool env_ok = slope <= -0.5 + 0.15;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "p=2 pipeline: |psi_inf - target| < 1e-3, B within 5%% of "
                "|Lambda|, envelope slope %.2f <= -0.35",
                slope);
  report(7, psi_ok && B_ok && env_ok, buf);
}

// ---------------------------------------------------------------- criterion 8
void criterion_p3_pipeline() {
  auto sol = solve_lambda_constraint({Rational(2), Rational(5)}, Rational(9, 4),
                                     Rational(2));
  PotentialSpec spec;
  spec.p = 3;
  spec.gamma = Rational(45, 100);
  spec.terms = {{sol.lambdas[0], Rational(2), XiMode::Dynamic, 0.5, sol.lambda_sqs[0]},
                {sol.lambdas[1], Rational(5), XiMode::Dynamic, 0.5, sol.lambda_sqs[1]}};
  spec.x0 = 1;
  spec.E = Rational(9, 4);
  auto plan = plan_construction(spec);
  auto coeff = omega_coefficient_exact(plan);
  bool omega_zero = coeff.has_value() && *coeff == 0;

  Potential V(spec, plan);
  IntegratorOptions opts{
      1e-3, prufer_max_frequency(3.0, {Rational(2), Rational(5)}), 0.05};
  const double X = 4000;
  // at p = 3 the xi feedback cancels the secular theta drift instead of
  // attracting, so psi_inf is a smooth function of xi0 and must be shot for
  double xi0 = shoot_psi_initial(V, 0.0, 1.0, X, plan.target_psi, 0.02, opts);
  auto mesh = construction_mesh(1.0, X, opts.max_frequency);
  auto traj = integrate_coupled_construction(V, 0.0, xi0, 1.0, X, mesh, opts);
  auto fit = fit_decay(traj, spec);
  bool B_ok = std::abs(fit.B / std::abs(plan.Lambda) - 1) < 0.05;

  // stretched-exponential regime: regression against x^{1-2gamma} must beat
  // regression against log x on rms residuals
  std::vector<double> ts, tl, y;
  for (const auto& s : traj.samples) {
    if (s.x < 40 || s.x > 3800) continue;
    ts.push_back(-std::pow(s.x, 0.1) / 0.1);
    tl.push_back(-std::log(s.x));
    y.push_back(s.logR);
  }
  double rms_stretched = least_squares(ts, y).rms;
  double rms_log = least_squares(tl, y).rms;
  bool regime_ok = rms_stretched < rms_log;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "p=3 pipeline: Omega coefficient exactly 0, B/|Lambda| = %.3f, "
                "stretched rms %.2e < log-x rms %.2e",
                fit.B / std::abs(plan.Lambda), rms_stretched, rms_log);
  report(8, omega_zero && B_ok && regime_ok, buf);
}

// ---------------------------------------------------------------- criterion 9
void criterion_controls() {
  auto spec = p2_dynamic();
  auto plan = plan_construction(spec);
  Potential V(spec, plan);
  IntegratorOptions opts{1e-3, prufer_max_frequency(2.0, {Rational(2)}), 0.05, -1};
  const double X = 4000;
  auto mesh = construction_mesh(1.0, X, opts.max_frequency);
  auto traj = integrate_coupled_construction(V, 0.0, 0.0, 1.0, X, mesh, opts);
  auto fit = fit_decay(traj, spec);
  bool growth = std::abs(fit.B + std::abs(plan.Lambda)) < 0.05 * std::abs(plan.Lambda);

  bool rejected = false;
  try {
    solve_lambda_constraint({Rational(2), Rational(5)}, Rational(8), Rational(1));
  } catch (const Infeasible&) {
    rejected = true;
  }
  report(9, growth && rejected,
         "wrong-branch lock grows at rate |Lambda|; infeasible lambda "
         "constraint rejected");
}

// --------------------------------------------------------------- criterion 10
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism(const std::string& cli) {
  auto dir = fs::temp_directory_path() / "wvn_acceptance";
  fs::create_directories(dir);
  auto cfg = dir / "spec.json";
  {
    std::ofstream out(cfg, std::ios::binary);
    out << p2_dynamic().to_json();
  }
  auto run_pipeline = [&](const std::string& tag) {
    std::string all;
    for (const char* verb : {"build", "simulate", "verify"}) {
      auto out = dir / (tag + "_" + verb + ".out");
      std::string cmd = cli + " " + verb + " --config " + cfg.string() +
                        " --x-max 2000 --tol 1e-3 --seed 7 --out " + out.string() +
                        " > /dev/null 2>&1";
      std::system(cmd.c_str());
      all += slurp(out);
    }
    return all;
  };
  auto a = run_pipeline("a");
  auto b = run_pipeline("b");
  report(10, !a.empty() && a == b,
         "full CLI pipeline rerun with identical config/seed is byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  criterion_identities();
  criterion_oracle();
  criterion_base_cases();
  criterion_pole_containment();
  criterion_integrator();
  criterion_classical();
  criterion_p2_pipeline();
  criterion_p3_pipeline();
  criterion_controls();
  if (argc > 1)
    criterion_determinism(argv[1]);
  else
    report(10, false, "CLI path not provided");
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
