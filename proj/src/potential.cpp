#include "wvn/potential.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>

namespace wvn {

using nlohmann::json;

Rational PotentialTerm::lambda_sq_or_approx() const {
  if (lambda_sq) return *lambda_sq;
  return Rational(lambda) * Rational(lambda);
}

void PotentialSpec::validate() const {
  if (p < 2) throw std::invalid_argument("spec: p must be >= 2");
  if (!(gamma * p > 1 && gamma * (p - 1) <= 1))
    throw std::invalid_argument("spec: gamma must lie in (1/p, 1/(p-1)]");
  if (!(x0 > 0)) throw std::invalid_argument("spec: x0 must be positive");
  if (!(E > 0)) throw std::invalid_argument("spec: E must be positive");
  std::set<Rational> seen;
  for (const auto& t : terms) {
    if (!(t.lambda > 0)) throw std::invalid_argument("spec: lambda must be positive");
    if (!(t.alpha > 0)) throw std::invalid_argument("spec: alpha must be positive");
    if (!seen.insert(t.alpha).second)
      throw std::invalid_argument("spec: duplicate alpha");
    if (t.lambda_sq && !(*t.lambda_sq > 0))
      throw std::invalid_argument("spec: lambda_sq must be positive");
  }
}

std::string PotentialSpec::to_json() const {
  json j;
  j["p"] = p;
  j["gamma"] = format_rational(gamma);
  j["terms"] = json::array();
  for (const auto& t : terms) {
    json jt;
    jt["lambda"] = t.lambda;
    jt["alpha"] = format_rational(t.alpha);
    jt["xi_mode"] = (t.xi_mode == XiMode::Frozen) ? "frozen" : "dynamic";
    jt["c"] = t.c;
    if (t.lambda_sq) jt["lambda_sq"] = format_rational(*t.lambda_sq);
    j["terms"].push_back(std::move(jt));
  }
  j["beta0_mode"] =
      (beta0_mode == Beta0Mode::Zero) ? "zero" : "iterative-cancellation";
  j["x0"] = x0;
  j["E"] = format_rational(E);
  return j.dump(2) + "\n";
}

PotentialSpec PotentialSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  PotentialSpec s;
  s.p = j.at("p").get<int>();
  s.gamma = parse_rational(j.at("gamma").get<std::string>());
  for (const auto& jt : j.at("terms")) {
    PotentialTerm t;
    t.lambda = jt.at("lambda").get<double>();
    t.alpha = parse_rational(jt.at("alpha").get<std::string>());
    std::string mode = jt.at("xi_mode").get<std::string>();
    if (mode == "frozen")
      t.xi_mode = XiMode::Frozen;
    else if (mode == "dynamic")
      t.xi_mode = XiMode::Dynamic;
    else
      throw std::invalid_argument("spec: unknown xi_mode '" + mode + "'");
    t.c = jt.at("c").get<double>();
    if (jt.contains("lambda_sq"))
      t.lambda_sq = parse_rational(jt.at("lambda_sq").get<std::string>());
    s.terms.push_back(std::move(t));
  }
  std::string b0 = j.at("beta0_mode").get<std::string>();
  if (b0 == "zero")
    s.beta0_mode = Beta0Mode::Zero;
  else if (b0 == "iterative-cancellation")
    s.beta0_mode = Beta0Mode::IterativeCancellation;
  else
    throw std::invalid_argument("spec: unknown beta0_mode '" + b0 + "'");
  s.x0 = j.at("x0").get<double>();
  s.E = parse_rational(j.at("E").get<std::string>());
  s.validate();
  return s;
}

namespace {
// Index of the term whose alpha matches |phi|; -1 for the zero phase.
int term_of_phase(const PotentialSpec& spec, const Rational& phi) {
  if (phi == 0) return -1;
  Rational a = phi < 0 ? Rational(-phi) : phi;
  for (size_t k = 0; k < spec.terms.size(); ++k)
    if (spec.terms[k].alpha == a) return static_cast<int>(k);
  throw std::logic_error("phase does not belong to the spec");
}
}  // namespace

std::vector<OmegaTerm> omega_terms(const PotentialSpec& spec, const Rational& eta,
                                   const std::vector<int>& term_sign) {
  // alphabet of component phases: +/- alpha_k plus the beta0 slot (phase 0)
  std::vector<Rational> alphabet;
  for (const auto& t : spec.terms) {
    alphabet.push_back(t.alpha);
    alphabet.push_back(-t.alpha);
  }
  alphabet.push_back(Rational(0));

  CoeffEngine engine(std::max(6, spec.p));
  std::vector<OmegaTerm> out;
  std::vector<int> pick;
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (remaining == 0) {
      Rational sum = 0;
      for (int i : pick) sum += alphabet[i];
      if (sum != 0) return;
      OmegaTerm term;
      for (int i : pick) term.phases.push_back(alphabet[i]);
      std::sort(term.phases.begin(), term.phases.end());
      term.order = static_cast<int>(term.phases.size());
      term.permutations = distinct_permutations(term.phases);
      auto f = engine.eval_f({term.order, 0}, {eta, term.phases});
      if (!f.finite)
        throw NonGeneric("omega term hits a coefficient pole at eta = " +
                         format_rational(eta));
      term.f_value = f.value;

      std::map<int, std::pair<int, int>> counts;  // term k -> (#plus, #minus)
      bool exact_ok = true;
      for (const auto& phi : term.phases) {
        int k = term_of_phase(spec, phi);
        if (k < 0) {
          ++term.beta0_count;
          continue;
        }
        int s = (phi > 0) ? 1 : -1;
        const auto& t = spec.terms[k];
        (s > 0 ? counts[k].first : counts[k].second)++;
        term.amplitude *= t.lambda / 2;
        double sigma =
            (k < static_cast<int>(term_sign.size())) ? term_sign[k] : 1.0;
        if (t.xi_mode == XiMode::Dynamic)
          term.xi_coefficient -= s * sigma * t.c;  // xi_k = -sigma_k c_k xi
        else
          term.frozen_phase += s * t.c;
      }
      for (const auto& [k, pm] : counts)
        if (pm.first != pm.second) exact_ok = false;
      if (exact_ok) {
        Rational amp = 1;
        for (const auto& [k, pm] : counts) {
          Rational lsq = spec.terms[k].lambda_sq_or_approx();
          for (int i = 0; i < pm.first; ++i) amp *= lsq / 4;
        }
        term.amplitude_exact = amp;
      }
      out.push_back(std::move(term));
      return;
    }
    for (int i = start; i < static_cast<int>(alphabet.size()); ++i) {
      pick.push_back(i);
      rec(i, remaining - 1);
      pick.pop_back();
    }
  };
  for (int I = 2; I <= spec.p - 1; ++I) rec(0, I);
  return out;
}

std::optional<Rational> omega_coefficient_exact(const ConstructionPlan& plan) {
  Rational total = 0;
  for (const auto& t : plan.omega) {
    if (t.beta0_count > 0) continue;  // vanishes at the beta0 = 0 baseline
    if (!t.amplitude_exact) return std::nullopt;
    total += Rational(t.permutations) * t.f_value * *t.amplitude_exact;
  }
  return total;
}

ConstructionPlan plan_construction(const PotentialSpec& spec) {
  spec.validate();
  PhaseSet a;
  for (const auto& t : spec.terms) {
    a.phases.insert(t.alpha);
    a.phases.insert(-t.alpha);
  }
  auto sp = build_resonance_set(a, spec.p);
  auto sp1 = build_resonance_set(a, spec.p - 1);
  if (!sp.contains(spec.E) || sp1.contains(spec.E))
    throw NotInSpSetminus("E = " + format_rational(spec.E) +
                          " is not in S_p \\ S_{p-1} for this phase set");
  const auto& reps = sp.energies.at(spec.E);
  if (reps.size() != 1)
    throw NonGeneric("E = " + format_rational(spec.E) + " has " +
                     std::to_string(reps.size()) + " representations");

  ConstructionPlan plan;
  plan.representation = reps[0];
  if (static_cast<int>(plan.representation.size()) != spec.p - 1)
    throw std::logic_error("representation length inconsistent with p");
  plan.eta = 0;
  for (const auto& phi : plan.representation) plan.eta += phi;
  plan.C1 = distinct_permutations(plan.representation);

  CoeffEngine engine(std::max(6, spec.p));
  auto f = engine.eval_f({spec.p - 1, 1}, {plan.eta, plan.representation});
  if (!f.finite || f.value == 0)
    throw NonGeneric("f_{p-1,1} is " + std::string(f.finite ? "zero" : "singular") +
                     " at the representation point");
  plan.f_value = f.value;

  std::vector<int> sigma(spec.terms.size(), 1);
  double lambda_product = 1;
  double dynamic_c_sum = 0;
  bool any_dynamic = false;
  for (const auto& phi : plan.representation) {
    int k = term_of_phase(spec, phi);
    int s = (phi > 0) ? 1 : -1;
    plan.term_index.push_back(k);
    plan.term_sign.push_back(s);
    sigma[k] = s;
    lambda_product *= spec.terms[k].lambda;
    if (spec.terms[k].xi_mode == XiMode::Dynamic) {
      any_dynamic = true;
      dynamic_c_sum += spec.terms[k].c;
    }
  }
  if (any_dynamic && std::abs(dynamic_c_sum - 1) > 1e-9)
    throw std::invalid_argument(
        "dynamic xi weights over the representation must sum to 1");

  plan.amplitude_factor = std::ldexp(1.0, -(spec.p - 1));  // cosine split
  plan.Lambda = static_cast<double>(plan.C1) * to_double(plan.f_value) *
                lambda_product * plan.amplitude_factor;
  plan.target_psi = -std::numbers::pi / 2 - std::arg(plan.Lambda);
  plan.omega = omega_terms(spec, plan.eta, sigma);
  return plan;
}

LambdaSolution solve_lambda_constraint(const std::vector<Rational>& alphas,
                                       const Rational& E, const Rational& scale) {
  if (alphas.size() < 2)
    throw std::invalid_argument("solve_lambda_constraint: need K >= 2");
  if (!(scale > 0))
    throw std::invalid_argument("solve_lambda_constraint: scale must be positive");
  const int K = static_cast<int>(alphas.size());
  std::vector<Rational> d(K);
  bool pos = false, neg = false;
  for (int k = 0; k < K; ++k) {
    d[k] = 4 * E - alphas[k] * alphas[k];
    if (d[k] == 0)
      throw Infeasible("4E equals alpha^2 for alpha = " + format_rational(alphas[k]));
    (d[k] > 0 ? pos : neg) = true;
  }
  if (!pos || !neg)
    throw Infeasible("E lies outside (min alpha^2/4, max alpha^2/4)");

  // Fix every amplitude at `scale` except one pivot solved from the
  // homogeneous constraint; some pivot always admits a positive solution
  // when both denominator signs are present.
  for (int pivot = K - 1; pivot >= 0; --pivot) {
    Rational rest = 0;
    for (int k = 0; k < K; ++k)
      if (k != pivot) rest += scale * scale / d[k];
    Rational lsq = -d[pivot] * rest;
    if (!(lsq > 0)) continue;
    LambdaSolution sol;
    for (int k = 0; k < K; ++k) {
      Rational s = (k == pivot) ? lsq : scale * scale;
      sol.lambda_sqs.push_back(s);
      sol.lambdas.push_back(std::sqrt(to_double(s)));
    }
    return sol;
  }
  throw std::logic_error("no pivot admits a positive amplitude");  // unreachable
}

Potential::Potential(PotentialSpec spec, ConstructionPlan plan)
    : spec_(std::move(spec)), plan_(std::move(plan)), eta_(to_double(plan_.eta)) {}

double Potential::xi_term(int k, double xi) const {
  const auto& t = spec_.terms[k];
  if (t.xi_mode == XiMode::Frozen) return t.c;
  int sigma = 0;
  for (size_t a = 0; a < plan_.term_index.size(); ++a)
    if (plan_.term_index[a] == k) sigma = plan_.term_sign[a];
  // the resonant term reads e^{i(2 theta - sum sigma_a xi_{k_a})}, so the
  // minus sign makes psi = xi + 2 theta with the aggregate state xi
  return -sigma * t.c * xi;
}

double Potential::omega(double x, double xi, double b) const {
  double gamma = to_double(spec_.gamma);
  double total = 0;
  for (const auto& t : plan_.omega) {
    int n = t.order - t.beta0_count;
    double v = static_cast<double>(t.permutations) * to_double(t.f_value) *
               t.amplitude * std::pow(x, -gamma * n);
    for (int i = 0; i < t.beta0_count; ++i) v *= b;
    total += v * std::cos(t.xi_coefficient * xi + t.frozen_phase);
  }
  return total;
}

double Potential::beta0(double x, double xi) const {
  if (spec_.beta0_mode == Beta0Mode::Zero) return 0;
  double b = 0;
  for (int i = 0; i < spec_.p - 1; ++i) b = eta_ * omega(x, xi, b);
  return b;
}

double Potential::operator()(double x, double xi) const {
  if (x < spec_.x0) return 0;
  double gamma = to_double(spec_.gamma);
  double envelope = std::pow(x, -gamma);
  double v = 0;
  for (size_t k = 0; k < spec_.terms.size(); ++k) {
    const auto& t = spec_.terms[k];
    v += t.lambda * envelope *
         std::cos(to_double(t.alpha) * x + xi_term(static_cast<int>(k), xi));
  }
  return v + beta0(x, xi);
}

}  // namespace wvn
