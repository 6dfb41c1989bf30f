// Python bindings for the main operations: resonance sets, exact
// coefficient evaluation, construction planning, simulation and
// verification. Exact rationals cross the boundary as "num/den" strings.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wvn/asymptotics.hpp"
#include "wvn/coeff.hpp"
#include "wvn/integrate.hpp"
#include "wvn/phase_sets.hpp"
#include "wvn/potential.hpp"

namespace py = pybind11;
using namespace wvn;

namespace {

std::vector<Rational> to_rationals(const std::vector<std::string>& v) {
  std::vector<Rational> out;
  for (const auto& s : v) out.push_back(parse_rational(s));
  return out;
}

std::vector<std::string> from_rationals(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(format_rational(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_wvnlab, m) {
  m.doc() = "embedded-eigenvalue laboratory for oscillatory decaying potentials";

  m.def(
      "resonance_set",
      [](const std::vector<std::string>& phases, int p) {
        auto rs = build_resonance_set(PhaseSet::from_list(to_rationals(phases)), p);
        py::dict d;
        d["p"] = p;
        d["energies"] = from_rationals(rs.energy_list());
        py::dict reps;
        for (const auto& [e, rr] : rs.energies) {
          py::list lst;
          for (const auto& rep : rr) lst.append(from_rationals(rep));
          reps[py::str(format_rational(e))] = lst;
        }
        d["representations"] = reps;
        return d;
      },
      py::arg("phases"), py::arg("p"),
      "Candidate embedded-eigenvalue energies S_p with representations");

  m.def(
      "eval_coefficient",
      [](const std::string& which, int I, int K, const std::string& eta,
         const std::vector<std::string>& phis) -> py::object {
        EvalPoint point{parse_rational(eta), to_rationals(phis)};
        CoeffEngine engine(std::max(6, I));
        CoeffValue v;
        if (which == "f") v = engine.eval_f({I, K}, point);
        else if (which == "g") v = engine.eval_g({I, K}, point);
        else if (which == "F") v = engine.eval_F({I, K}, point);
        else if (which == "G") v = engine.eval_G({I, K}, point);
        else throw std::invalid_argument("which must be f, g, F or G");
        if (!v.finite) return py::none();
        return py::str(format_rational(v.value));
      },
      py::arg("which"), py::arg("I"), py::arg("K"), py::arg("eta"),
      py::arg("phis"),
      "Exact rational value as a string, or None at a genuine pole");

  m.def(
      "build_plan",
      [](const std::string& spec_json) {
        auto spec = PotentialSpec::from_json(spec_json);
        auto plan = plan_construction(spec);
        py::dict d;
        d["eta"] = format_rational(plan.eta);
        d["representation"] = from_rationals(plan.representation);
        d["C1"] = plan.C1.str();
        d["f_value"] = format_rational(plan.f_value);
        d["Lambda"] = std::complex<double>(plan.Lambda);
        d["target_psi"] = plan.target_psi;
        return d;
      },
      py::arg("spec_json"), "Construction plan from a PotentialSpec JSON string");

  m.def(
      "solve_lambda_constraint",
      [](const std::vector<std::string>& alphas, const std::string& E,
         const std::string& scale) {
        auto sol = solve_lambda_constraint(to_rationals(alphas), parse_rational(E),
                                           parse_rational(scale));
        py::dict d;
        d["lambdas"] = sol.lambdas;
        d["lambda_sqs"] = from_rationals(sol.lambda_sqs);
        return d;
      },
      py::arg("alphas"), py::arg("E"), py::arg("scale"),
      "Amplitudes with sum lambda^2/(4E - alpha^2) = 0 exactly");

  m.def(
      "simulate",
      [](const std::string& spec_json, double x_max, double tol) {
        auto spec = PotentialSpec::from_json(spec_json);
        auto plan = plan_construction(spec);
        Potential V(spec, plan);
        std::vector<Rational> alphas;
        for (const auto& t : spec.terms) alphas.push_back(t.alpha);
        IntegratorOptions opts{tol,
                               prufer_max_frequency(to_double(plan.eta), alphas),
                               0.05};
        auto mesh = construction_mesh(spec.x0, x_max, opts.max_frequency);
        bool dynamic = std::any_of(
            spec.terms.begin(), spec.terms.end(),
            [](const auto& t) { return t.xi_mode == XiMode::Dynamic; });
        Trajectory traj;
        if (dynamic) {
          double xi0 = shoot_psi_initial(V, 0.0, spec.x0, x_max, plan.target_psi,
                                         1e-4, opts);
          traj = integrate_coupled_construction(V, 0.0, xi0, spec.x0, x_max, mesh,
                                                opts);
        } else {
          auto Vx = [&](double x) { return V(x, 0.0); };
          traj = integrate_prufer(Vx, to_double(spec.E), 0.0, 0.0, spec.x0, x_max,
                                  mesh, opts);
        }
        py::list rows;
        for (const auto& s : traj.samples)
          rows.append(py::make_tuple(s.x, s.theta, s.logR, s.xi));
        py::dict d;
        d["samples"] = rows;
        d["sup_logR"] = traj.sup_logR;
        return d;
      },
      py::arg("spec_json"), py::arg("x_max") = 1e3, py::arg("tol") = 1e-3,
      "Integrate the Prufer system for a planned construction");

  m.def(
      "verify",
      [](const std::string& spec_json, double x_max, double tol) {
        auto spec = PotentialSpec::from_json(spec_json);
        auto plan = plan_construction(spec);
        Potential V(spec, plan);
        std::vector<Rational> alphas;
        for (const auto& t : spec.terms) alphas.push_back(t.alpha);
        IntegratorOptions opts{tol,
                               prufer_max_frequency(to_double(plan.eta), alphas),
                               0.05};
        auto mesh = construction_mesh(spec.x0, x_max, opts.max_frequency);
        double xi0 =
            shoot_psi_initial(V, 0.0, spec.x0, x_max, plan.target_psi, 1e-4, opts);
        auto traj =
            integrate_coupled_construction(V, 0.0, xi0, spec.x0, x_max, mesh, opts);
        auto rep = verify_construction(spec, plan, traj);
        py::dict d;
        d["psi_inf"] = rep.psi_inf;
        d["target_psi"] = rep.target_psi;
        d["B"] = rep.B;
        d["Lambda_abs"] = rep.Lambda_abs;
        d["ratio"] = rep.ratio;
        d["psi_locked"] = rep.psi_ok;
        d["decay_rate"] = rep.B_ok;
        d["slope_residual"] = rep.slope_ok;
        d["all_ok"] = rep.all_ok();
        return d;
      },
      py::arg("spec_json"), py::arg("x_max") = 2e3, py::arg("tol") = 1e-3,
      "Full verification report for a dynamic-phase construction");
}
