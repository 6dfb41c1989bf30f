#pragma once

// Exact pointwise evaluation of the coefficient functions f_{I,K}, g_{I,K}
// and their rescaled versions F_{I,K}, G_{I,K}:
//
//   F_{1,K} = 1,  F_{I,K} = sum_{a=-1..1} Omega_a (.) G_{I-1,K+a}   (I >= 2)
//   G_{I,K} = K / (K eta - sum phi_i) * F_{I,K},   G_{I,0} = 0
//   f_{I,K} = (-1)^{K-1} eta^{-I} F_{I,K},  g_{I,K} = 2 (-1)^K eta^{-I} G_{I,K}
//
// with (.) the permutation-averaged symmetric product. Everything is computed
// over exact rationals; a division hitting zero is retried over Q(eps) with
// eta -> eta + eps so that removable singularities evaluate to their limit
// and only genuine poles are reported non-finite.

#include "wvn/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wvn {

struct CoeffKey {
  int I = 1;  // number of phase arguments
  int K = 0;  // exponential index, 0 <= K <= I
};

struct EvalPoint {
  Rational eta;
  std::vector<Rational> phis;
};

struct CoeffValue {
  Rational value;
  bool finite = true;
};

class CoeffEngine {
 public:
  explicit CoeffEngine(int max_I = 6) : max_I_(max_I) {}

  CoeffValue eval_F(const CoeffKey& key, const EvalPoint& point) const;
  CoeffValue eval_G(const CoeffKey& key, const EvalPoint& point) const;
  CoeffValue eval_f(const CoeffKey& key, const EvalPoint& point) const;  // eta != 0
  CoeffValue eval_g(const CoeffKey& key, const EvalPoint& point) const;

  /// Direct lattice-path summation for F_{I,0} (independent oracle).
  /// Path weights use the step products between consecutive levels only,
  /// which reproduces F_{1,0} = 1 at I = 1 and the printed convention above it.
  CoeffValue eval_H_expansion(int I, const EvalPoint& point) const;

  /// Predicted pole locus: eta equal to a sub-multiset sum of the phases with
  /// b < I terms (F and f) or b <= I terms (G and g). Valid for eta > 0.
  static bool singularity_support_F(const CoeffKey& key, const EvalPoint& point);
  static bool singularity_support_G(const CoeffKey& key, const EvalPoint& point);

  int max_I() const { return max_I_; }

 private:
  int max_I_;
};

/// Symmetric function of (eta; phi_1..phi_n); nullopt signals a pole.
using SymFn =
    std::function<std::optional<Rational>(const Rational&, std::span<const Rational>)>;

/// (p (.) q)(eta; phis) = 1/(I+J)! * sum over permutations of
/// p(eta; first I) * q(eta; last J). point.phis.size() must equal I + J.
std::optional<Rational> symmetric_product(const SymFn& p, int I, const SymFn& q, int J,
                                          const EvalPoint& point);

struct IdentityViolation {
  std::string identity;  // "F" or "G"
  EvalPoint point;
};

struct IdentityReport {
  int requested = 0;
  int checked = 0;  // pole-free points actually asserted
  std::vector<IdentityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Verifies F_{I,K} = sum_i F_{i,k} (.) G_{I-i,K-k} and the same with G on the
/// left, at `trials` random rational points; points where any term is
/// non-finite are skipped and resampled.
IdentityReport check_convolution_identities(int I, int K, int k, int trials,
                                            uint64_t seed);

}  // namespace wvn
