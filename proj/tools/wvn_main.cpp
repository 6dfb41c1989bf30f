// Command-line surface: resonance sets, exact coefficient queries and
// identity checks, construction planning, trajectory simulation,
// verification reports and energy scans. One command writes one artifact;
// all writes are atomic (temp + rename) and byte-deterministic for a fixed
// config and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include "wvn/asymptotics.hpp"
#include "wvn/coeff.hpp"
#include "wvn/integrate.hpp"
#include "wvn/phase_sets.hpp"
#include "wvn/potential.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace wvn;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a, enough to fingerprint a config in a provenance header
std::string content_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    atomic_write(out_path, content);
}

std::string provenance(const std::string& config_text, uint64_t seed) {
  std::string p = "# version: ";
  p += kVersion;
  p += "\n# config-hash: " + content_hash(config_text);
  p += "\n# seed: " + std::to_string(seed) + "\n";
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Rational> parse_rational_list(const std::string& csv) {
  std::vector<Rational> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  return out;
}

json plan_to_json(const ConstructionPlan& plan) {
  json j;
  j["eta"] = format_rational(plan.eta);
  j["representation"] = json::array();
  for (const auto& phi : plan.representation)
    j["representation"].push_back(format_rational(phi));
  j["C1"] = plan.C1.str();
  j["f_value"] = format_rational(plan.f_value);
  j["amplitude_factor"] = plan.amplitude_factor;
  j["Lambda"] = {plan.Lambda.real(), plan.Lambda.imag()};
  j["target_psi"] = plan.target_psi;
  j["omega_terms"] = json::array();
  for (const auto& t : plan.omega) {
    json jt;
    jt["phases"] = json::array();
    for (const auto& phi : t.phases) jt["phases"].push_back(format_rational(phi));
    jt["order"] = t.order;
    jt["permutations"] = t.permutations.str();
    jt["f_value"] = format_rational(t.f_value);
    jt["beta0_count"] = t.beta0_count;
    j["omega_terms"].push_back(std::move(jt));
  }
  return j;
}

struct SimulationResult {
  Trajectory traj;
  double xi0 = 0;
  bool coupled = false;
};

IntegratorOptions options_for(const PotentialSpec& spec, double tol) {
  std::vector<Rational> alphas;
  for (const auto& t : spec.terms) alphas.push_back(t.alpha);
  double eta = 2 * std::sqrt(to_double(spec.E));
  return {tol, prufer_max_frequency(eta, alphas), 0.05};
}

// Construction run when the spec admits a plan; plain Prufer run otherwise
// (e.g. off-resonance energies or empty potentials).
SimulationResult simulate_spec(const PotentialSpec& spec, double x_max, double tol,
                               double theta0) {
  auto opts = options_for(spec, tol);
  SimulationResult res;
  try {
    auto plan = plan_construction(spec);
    Potential V(spec, plan);
    bool dynamic =
        std::any_of(spec.terms.begin(), spec.terms.end(),
                    [](const auto& t) { return t.xi_mode == XiMode::Dynamic; });
    auto mesh = construction_mesh(spec.x0, x_max, opts.max_frequency);
    if (dynamic) {
      res.xi0 =
          shoot_psi_initial(V, theta0, spec.x0, x_max, plan.target_psi, 1e-4, opts);
      res.traj = integrate_coupled_construction(V, theta0, res.xi0, spec.x0, x_max,
                                                mesh, opts);
      res.coupled = true;
      return res;
    }
    auto Vx = [&](double x) { return V(x, 0.0); };
    res.traj = integrate_prufer(Vx, to_double(spec.E), theta0, 0.0, spec.x0, x_max,
                                mesh, opts);
    return res;
  } catch (const NotInSpSetminus&) {
    // no resonant plan: integrate the bare cosine sum
    if (spec.beta0_mode != Beta0Mode::Zero)
      throw std::runtime_error(
          "iterative beta0 needs a construction plan; this E admits none");
    auto Vx = [&](double x) {
      if (x < spec.x0) return 0.0;
      double g = to_double(spec.gamma);
      double v = 0;
      for (const auto& t : spec.terms)
        v += t.lambda * std::pow(x, -g) * std::cos(to_double(t.alpha) * x + t.c);
      return v;
    };
    auto mesh = construction_mesh(spec.x0, x_max, opts.max_frequency);
    res.traj = integrate_prufer(Vx, to_double(spec.E), theta0, 0.0, spec.x0, x_max,
                                mesh, opts);
    return res;
  }
}

int cmd_resonance_set(const std::string& phases_csv, int p,
                      const std::string& out_path) {
  auto phases = parse_rational_list(phases_csv);
  auto set = PhaseSet::from_list(phases);
  auto rs = build_resonance_set(set, p);
  json j;
  j["p"] = p;
  j["phases"] = json::array();
  for (const auto& phi : set.phases) j["phases"].push_back(format_rational(phi));
  j["energies"] = json::array();
  for (const auto& e : rs.energy_list()) j["energies"].push_back(format_rational(e));
  j["representations"] = json::object();
  for (const auto& [e, reps] : rs.energies) {
    json lst = json::array();
    for (const auto& rep : reps) {
      json r = json::array();
      for (const auto& phi : rep) r.push_back(format_rational(phi));
      lst.push_back(std::move(r));
    }
    j["representations"][format_rational(e)] = std::move(lst);
  }
  j["zero_sum_representations"] = json::array();
  for (const auto& rep : rs.zero_energy_representations) {
    json r = json::array();
    for (const auto& phi : rep) r.push_back(format_rational(phi));
    j["zero_sum_representations"].push_back(std::move(r));
  }
  emit(out_path, j.dump(2) + "\n");
  return 0;
}

int cmd_coeffs_eval(const std::string& which, int I, int K,
                    const std::string& eta_s, const std::string& phis_csv,
                    const std::string& out_path) {
  EvalPoint point;
  point.eta = parse_rational(eta_s);
  if (!phis_csv.empty()) point.phis = parse_rational_list(phis_csv);
  if (static_cast<int>(point.phis.size()) != I)
    throw std::runtime_error("need exactly I phases (got " +
                             std::to_string(point.phis.size()) + ")");
  CoeffEngine engine(std::max(6, I));
  CoeffValue v;
  if (which == "f")
    v = engine.eval_f({I, K}, point);
  else if (which == "g")
    v = engine.eval_g({I, K}, point);
  else if (which == "F")
    v = engine.eval_F({I, K}, point);
  else
    v = engine.eval_G({I, K}, point);
  if (!v.finite) {
    emit(out_path,
         "non-finite: eta lies on a resonance hyperplane (a sub-multiset of "
         "the phases sums to a multiple of eta)\n");
    return 1;
  }
  emit(out_path, format_rational(v.value) + "\n");
  return 0;
}

int cmd_coeffs_check(int I, int K, int k, int trials, uint64_t seed,
                     const std::string& out_path) {
  auto report = check_convolution_identities(I, K, k, trials, seed);
  std::ostringstream ss;
  if (report.ok()) {
    ss << "OK " << report.checked << "/" << report.requested << "\n";
    emit(out_path, ss.str());
    return 0;
  }
  ss << "VIOLATIONS " << report.violations.size() << " in " << report.checked
     << " checked points\n";
  emit(out_path, ss.str());
  return 1;
}

int cmd_coeffs_oracle(int I, int trials, uint64_t seed,
                      const std::string& out_path) {
  CoeffEngine engine(std::max(6, I));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  int matched = 0, attempts = 0;
  while (matched < trials && attempts < 100 * trials) {
    ++attempts;
    EvalPoint p;
    p.eta = Rational(num(rng), den(rng));
    for (int i = 0; i < I; ++i) p.phis.push_back(Rational(num(rng), den(rng)));
    auto h = engine.eval_H_expansion(I, p);
    auto f = engine.eval_F({I, 0}, p);
    if (!h.finite || !f.finite) continue;
    if (h.value != f.value) {
      emit(out_path, "MISMATCH at eta = " + format_rational(p.eta) + "\n");
      return 1;
    }
    ++matched;
  }
  emit(out_path, "OK " + std::to_string(matched) + "/" + std::to_string(trials) +
                     " H-expansion matches F_{I,0}\n");
  return 0;
}

int cmd_build(const std::string& config_path, const std::string& out_path) {
  auto text = read_file(config_path);
  auto spec = PotentialSpec::from_json(text);
  auto plan = plan_construction(spec);
  json j = plan_to_json(plan);
  j["spec"] = json::parse(spec.to_json());
  auto exact = omega_coefficient_exact(plan);
  if (exact) j["omega_coefficient"] = format_rational(*exact);
  emit(out_path, j.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const std::string& config_path, double x_max, double tol,
                 uint64_t seed, const std::string& out_path) {
  auto text = read_file(config_path);
  auto spec = PotentialSpec::from_json(text);
  auto res = simulate_spec(spec, x_max, tol, 0.0);
  std::string body = provenance(text, seed) + trajectory_csv(res.traj);
  emit(out_path, body);
  return 0;
}

int cmd_verify(const std::string& config_path, double x_max, double tol,
               uint64_t seed, const std::string& out_path) {
  auto text = read_file(config_path);
  auto spec = PotentialSpec::from_json(text);
  auto plan = plan_construction(spec);
  auto res = simulate_spec(spec, x_max, tol, 0.0);
  auto rep = verify_construction(spec, plan, res.traj);
  json j;
  j["psi_inf"] = rep.psi_inf;
  j["target_psi"] = rep.target_psi;
  j["B"] = rep.B;
  j["Lambda_abs"] = rep.Lambda_abs;
  j["ratio"] = rep.ratio;
  j["residual"] = rep.residual;
  j["slope_residual_exponent"] = rep.slope_residual;
  j["verdicts"] = {{"psi_locked", rep.psi_ok},
                   {"decay_rate", rep.B_ok},
                   {"slope_residual", rep.slope_ok}};
  j["config_hash"] = content_hash(text);
  j["seed"] = seed;
  j["version"] = kVersion;
  emit(out_path, j.dump(2) + "\n");
  return rep.all_ok() ? 0 : 1;
}

int cmd_scan(const std::string& config_path, double e_min, double e_max, int n,
             double x_max, double tol, uint64_t seed, const std::string& out_path) {
  auto text = read_file(config_path);
  auto spec = PotentialSpec::from_json(text);
  double g = to_double(spec.gamma);
  auto V = [spec, g](double x) {
    if (x < spec.x0) return 0.0;
    double v = 0;
    for (const auto& t : spec.terms)
      v += t.lambda * std::pow(x, -g) * std::cos(to_double(t.alpha) * x + t.c);
    return v;
  };
  std::vector<double> grid;
  for (int i = 0; i < n; ++i)
    grid.push_back(e_min + (e_max - e_min) * i / std::max(1, n - 1));
  std::vector<Rational> alphas;
  for (const auto& t : spec.terms) alphas.push_back(t.alpha);
  auto pts = scan_energies(V, grid, spec.x0, x_max, alphas, tol);
  std::string body = provenance(text, seed) + "E,sup_logR,status\n";
  for (const auto& p : pts)
    body += fmt17(p.E) + "," + fmt17(p.sup_logR) + "," + p.status + "\n";
  emit(out_path, body);
  if (!out_path.empty()) {
    std::string gp = "set datafile separator ','\nset logscale y\n";
    gp += "set xlabel 'E'\nset ylabel 'sup logR'\n";
    gp += "plot '" + out_path + "' every ::1 using 1:2 with linespoints\n";
    atomic_write(out_path + ".gp", gp);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedded-eigenvalue laboratory for oscillatory decaying "
               "potentials"};
  app.require_subcommand(1);
  app.fallthrough();  // --out/--seed/--tol/--x-max may follow the subcommand

  std::string out_path;
  uint64_t seed = 7;
  double tol = 1e-3;
  double x_max = 1e4;
  app.add_option("--out", out_path, "output file (stdout when omitted)");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--tol", tol, "integrator tolerance");
  app.add_option("--x-max", x_max, "upper end of the integration range");

  auto* rs = app.add_subcommand("resonance-set", "candidate energies S_p");
  std::string phases_csv;
  int p = 2;
  rs->add_option("--phases", phases_csv, "comma-separated rational phases")
      ->required();
  rs->add_option("--p", p, "order p")->required();

  auto* co = app.add_subcommand("coeffs", "exact coefficient functions");
  co->require_subcommand(1);
  auto* ce = co->add_subcommand("eval", "evaluate one coefficient");
  std::vector<int> ik_f, ik_g, ik_F, ik_G;
  std::string eta_s, phis_csv;
  ce->add_option("--f", ik_f, "I K for f_{I,K}")->expected(2);
  ce->add_option("--g", ik_g, "I K for g_{I,K}")->expected(2);
  ce->add_option("--F", ik_F, "I K for F_{I,K}")->expected(2);
  ce->add_option("--G", ik_G, "I K for G_{I,K}")->expected(2);
  ce->add_option("--eta", eta_s, "eta as a rational")->required();
  ce->add_option("--phis", phis_csv, "comma-separated phases (I of them)");
  auto* cc = co->add_subcommand("check", "randomized exact identity check");
  std::string identity = "5.8";
  int cI = 2, cK = 2, ck = 1, trials = 100;
  cc->add_option("--identity", identity, "identity label (informational)");
  cc->add_option("--I", cI)->required();
  cc->add_option("--K", cK)->required();
  cc->add_option("--k", ck)->required();
  cc->add_option("--trials", trials);
  auto* cr = co->add_subcommand("oracle", "lattice-path oracle comparison");
  int oI = 3, otrials = 20;
  cr->add_option("--I", oI)->required();
  cr->add_option("--trials", otrials);

  std::string config_path;
  auto* bd = app.add_subcommand("build", "construction plan from a spec");
  bd->add_option("--config", config_path, "PotentialSpec JSON")->required();
  auto* sm = app.add_subcommand("simulate", "trajectory CSV from a spec");
  sm->add_option("--config", config_path, "PotentialSpec JSON")->required();
  auto* vf = app.add_subcommand("verify", "end-to-end verification report");
  vf->add_option("--config", config_path, "PotentialSpec JSON")->required();
  auto* sc = app.add_subcommand("scan", "sup-logR over an energy grid");
  double e_min = 0.2, e_max = 3.0;
  int scan_n = 57;
  sc->add_option("--config", config_path, "PotentialSpec JSON")->required();
  sc->add_option("--e-min", e_min);
  sc->add_option("--e-max", e_max);
  sc->add_option("--n", scan_n);

  CLI11_PARSE(app, argc, argv);

  try {
    if (rs->parsed()) return cmd_resonance_set(phases_csv, p, out_path);
    if (ce->parsed()) {
      std::string which;
      std::vector<int>* ik = nullptr;
      if (!ik_f.empty()) which = "f", ik = &ik_f;
      else if (!ik_g.empty()) which = "g", ik = &ik_g;
      else if (!ik_F.empty()) which = "F", ik = &ik_F;
      else if (!ik_G.empty()) which = "G", ik = &ik_G;
      else throw std::runtime_error("pick one of --f/--g/--F/--G");
      return cmd_coeffs_eval(which, (*ik)[0], (*ik)[1], eta_s, phis_csv, out_path);
    }
    if (cc->parsed()) return cmd_coeffs_check(cI, cK, ck, trials, seed, out_path);
    if (cr->parsed()) return cmd_coeffs_oracle(oI, otrials, seed, out_path);
    if (bd->parsed()) return cmd_build(config_path, out_path);
    if (sm->parsed()) return cmd_simulate(config_path, x_max, tol, seed, out_path);
    if (vf->parsed()) return cmd_verify(config_path, x_max, tol, seed, out_path);
    if (sc->parsed())
      return cmd_scan(config_path, e_min, e_max, scan_n, x_max, tol, seed,
                      out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
