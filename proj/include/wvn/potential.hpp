#pragma once

// Construction of power-decaying trigonometric potentials
//
//   V(x) = sum_k lambda_k x^{-gamma} cos(alpha_k x + xi_k(x)) + beta0(x)
//
// carrying a prescribed candidate eigenvalue E = eta^2/4 with eta a sum of
// p-1 signed phases. The planner selects the (unique, if generic)
// representation, computes the resonant amplitude Lambda and the phase-lock
// target, enumerates the zero-frequency Omega terms, and hands the
// integrator a pointwise evaluator with iterative beta0 cancellation.

#include "wvn/coeff.hpp"
#include "wvn/phase_sets.hpp"
#include "wvn/rational.hpp"

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wvn {

enum class XiMode { Frozen, Dynamic };
enum class Beta0Mode { Zero, IterativeCancellation };

struct PotentialTerm {
  double lambda = 0;  // amplitude, > 0
  Rational alpha;     // frequency, > 0
  XiMode xi_mode = XiMode::Frozen;
  // Frozen mode: c is the constant phase xi_k itself.
  // Dynamic mode: xi_k(x) = sigma_k * c * xi(x), sigma_k the sign with which
  // the term enters the representation (0 when unused).
  double c = 0;
  // Optional exact lambda^2 (lambda may be irrational, e.g. 4/sqrt(5), while
  // lambda^2 stays rational); enables exact Omega-coefficient arithmetic.
  std::optional<Rational> lambda_sq;

  Rational lambda_sq_or_approx() const;
  bool operator==(const PotentialTerm&) const = default;
};

struct PotentialSpec {
  int p = 2;
  Rational gamma;  // in (1/p, 1/(p-1)]
  std::vector<PotentialTerm> terms;
  Beta0Mode beta0_mode = Beta0Mode::Zero;
  double x0 = 1;
  Rational E;  // > 0

  bool critical() const { return gamma * (p - 1) == 1; }
  void validate() const;  // throws std::invalid_argument on broken invariants

  std::string to_json() const;
  static PotentialSpec from_json(const std::string& text);
  bool operator==(const PotentialSpec&) const = default;
};

struct OmegaTerm {
  Representation phases;  // sorted multiset, sum exactly 0; 0 entries = beta0
  int order = 0;          // I = phases.size()
  BigInt permutations;    // distinct orderings
  Rational f_value;       // f_{I,0}(eta; phases), finite by genericity
  int beta0_count = 0;    // number of zero entries
  // product over non-beta0 entries of lambda_k/2 (double; exact variant below)
  double amplitude = 1;
  // same product as an exact rational, available when each term enters with
  // matched +/- signs (so only lambda^2 appears) and lambda_sq is known
  std::optional<Rational> amplitude_exact;
  // aggregate phase-lock coefficient: sum over non-beta0 entries of
  // sign(phi) * xi coefficient; the e^{i * xi_sum * xi(x)} factor in the term
  double xi_coefficient = 0;
  double frozen_phase = 0;  // constant part of the same exponent
};

struct ConstructionPlan {
  Rational eta;                // 2 sqrt(E), exact (= sum of the representation)
  Representation representation;  // sorted signed phases, p-1 entries
  std::vector<int> term_index;    // term k for each representation entry
  std::vector<int> term_sign;     // sign sigma for each entry
  BigInt C1;                      // distinct permutations of the representation
  Rational f_value;               // f_{p-1,1}(eta; representation)
  double amplitude_factor = 1;    // (1/2)^{p-1} from the cosine split
  std::complex<double> Lambda;    // C1 * f * prod(lambda) * amplitude_factor
  double target_psi = 0;          // -pi/2 - arg Lambda
  std::vector<OmegaTerm> omega;   // zero-frequency terms, order 2..p-1
};

struct NonGeneric : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotInSpSetminus : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checks E in S_p \ S_{p-1}, uniqueness of the representation, and
/// f_{p-1,1} finite and nonzero; fills in Lambda, the target phase and the
/// Omega term table. Throws NotInSpSetminus / NonGeneric.
ConstructionPlan plan_construction(const PotentialSpec& spec);

struct LambdaSolution {
  std::vector<double> lambdas;
  std::vector<Rational> lambda_sqs;  // exact; sum lambda_sq/(4E - alpha^2) == 0
};

/// Positive amplitudes with sum_k lambda_k^2 / (4E - alpha_k^2) = 0 exactly,
/// normalized so that the non-pivot entries equal `scale`. Throws Infeasible
/// when every denominator has the same sign (E outside the alpha^2/4 range).
LambdaSolution solve_lambda_constraint(const std::vector<Rational>& alphas,
                                       const Rational& E, const Rational& scale);

/// Zero-frequency terms of order 2..p-1 over the signed phases of `spec`,
/// including tuples with zero-phase (beta0) slots that only matter once the
/// iteration produces a nonzero beta0. Throws NonGeneric on a pole.
/// `term_sign[k]` is the sign with which term k enters the representation
/// (affects only dynamic-mode xi coefficients; empty means all +1).
std::vector<OmegaTerm> omega_terms(const PotentialSpec& spec, const Rational& eta,
                                   const std::vector<int>& term_sign = {});

/// Exact leading Omega coefficient (the x^{-2gamma} prefactor for p = 3 with
/// beta0 = 0), available when all lambda_sq are exact and every tuple pairs
/// its indices evenly; nullopt otherwise.
std::optional<Rational> omega_coefficient_exact(const ConstructionPlan& plan);

/// Pointwise potential built from a spec and plan; pure except for nothing --
/// safe to share across threads.
class Potential {
 public:
  Potential(PotentialSpec spec, ConstructionPlan plan);

  /// V(x) given the current aggregate phase xi(x); 0 for x < x0.
  double operator()(double x, double xi = 0) const;

  /// beta0(x): 0 in Zero mode, else p-1 fixed-point iterations of
  /// b -> b + eta * Omega(x, xi, b).
  double beta0(double x, double xi) const;

  /// Omega(x) with the zero-phase component amplitude b (the current beta0).
  double omega(double x, double xi, double b) const;

  double xi_term(int k, double xi) const;  // the phase xi_k(x) of term k

  const PotentialSpec& spec() const { return spec_; }
  const ConstructionPlan& plan() const { return plan_; }

 private:
  PotentialSpec spec_;
  ConstructionPlan plan_;
  double eta_;
};

}  // namespace wvn
