#include "wvn/coeff.hpp"

#include "wvn/ratfunc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wvn {

namespace {

// Recursion core, templated on the scalar: plain rationals for the fast path,
// univariate Laurent series in eps (eta -> eta + eps) for the retry that
// resolves removable singularities. Memoized on (K, sorted phase multiset).
template <class T>
class Core {
 public:
  explicit Core(T eta) : eta_(std::move(eta)) {}

  // nullopt = division by zero encountered (possible only for T = Rational)
  std::optional<T> F(int K, std::vector<Rational> phis) {
    const int I = static_cast<int>(phis.size());
    if (K < 0 || K > I) return T(Rational(0));
    if (I == 0) return T(Rational(0));  // F_{0,0} = 0
    if (I == 1) return T(Rational(1));
    std::sort(phis.begin(), phis.end());
    auto it = memo_f_.find({K, phis});
    if (it != memo_f_.end()) return it->second;
    // F_{I,K} = sum_a Omega_a (.) G_{I-1,K+a}; with G symmetric this is an
    // average over which phase is handed to the (constant) Omega slot.
    T acc(Rational(0));
    std::optional<T> result;
    bool bad = false;
    for (size_t j = 0; j < phis.size() && !bad; ++j) {
      if (j > 0 && phis[j] == phis[j - 1]) continue;
      size_t mult = std::count(phis.begin(), phis.end(), phis[j]);
      std::vector<Rational> rest;
      rest.reserve(phis.size() - 1);
      for (size_t m = 0; m < phis.size(); ++m)
        if (m != j) rest.push_back(phis[m]);
      T inner(Rational(0));
      for (int a = -1; a <= 1 && !bad; ++a) {
        auto g = G(K + a, rest);
        if (!g) {
          bad = true;
          break;
        }
        Rational w = (a == 0) ? 2 : 1;  // Omega_a
        inner += T(w) * *g;
      }
      if (!bad) acc += T(Rational(mult)) * inner;
    }
    if (!bad) result = T(Rational(1) / Rational(I)) * acc;
    memo_f_[{K, std::move(phis)}] = result;
    return result;
  }

  std::optional<T> G(int K, std::vector<Rational> phis) {
    const int I = static_cast<int>(phis.size());
    if (K < 0 || K > I) return T(Rational(0));
    if (K == 0) return T(Rational(0));
    std::sort(phis.begin(), phis.end());
    auto it = memo_g_.find({K, phis});
    if (it != memo_g_.end()) return it->second;
    std::optional<T> result;
    auto f = F(K, phis);
    if (f) {
      Rational phi_sum = std::accumulate(phis.begin(), phis.end(), Rational(0));
      T denom = T(Rational(K)) * eta_ - T(phi_sum);
      if (auto q = checked_div(T(Rational(K)) * *f, denom)) result = *q;
    }
    memo_g_[{K, std::move(phis)}] = result;
    return result;
  }

 private:
  static std::optional<Rational> checked_div(const Rational& n, const Rational& d) {
    if (d == 0) return std::nullopt;
    return n / d;
  }
  static std::optional<EpsSeries> checked_div(const EpsSeries& n, const EpsSeries& d) {
    if (d.is_zero()) return std::nullopt;  // unreachable: denom has an eps term
    return n / d;
  }

  T eta_;
  std::map<std::pair<int, std::vector<Rational>>, std::optional<T>> memo_f_, memo_g_;
};

enum class Which { F, G };

// Fast rational evaluation; on a division-by-zero, re-evaluate over Q(eps)
// and take the eps -> 0 limit to separate removable from genuine poles.
CoeffValue eval_FG(Which which, const CoeffKey& key, const EvalPoint& point,
                   int max_I) {
  const int I = static_cast<int>(point.phis.size());
  if (I != key.I) throw std::invalid_argument("coeff: phis length does not match I");
  if (key.K < 0 || key.K > key.I) throw std::invalid_argument("coeff: need 0 <= K <= I");
  if (key.I > max_I) throw std::invalid_argument("coeff: I exceeds configured cap");
  {
    Core<Rational> core(point.eta);
    auto v = (which == Which::F) ? core.F(key.K, point.phis) : core.G(key.K, point.phis);
    if (v) return {*v, true};
  }
  Core<EpsSeries> core(EpsSeries(point.eta) + EpsSeries::eps());
  auto v = (which == Which::F) ? core.F(key.K, point.phis) : core.G(key.K, point.phis);
  if (v) {
    if (auto lim = v->limit_at_zero()) return {*lim, true};
  }
  return {Rational(0), false};
}

}  // namespace

CoeffValue CoeffEngine::eval_F(const CoeffKey& key, const EvalPoint& point) const {
  return eval_FG(Which::F, key, point, max_I_);
}

CoeffValue CoeffEngine::eval_G(const CoeffKey& key, const EvalPoint& point) const {
  return eval_FG(Which::G, key, point, max_I_);
}

CoeffValue CoeffEngine::eval_f(const CoeffKey& key, const EvalPoint& point) const {
  if (point.eta == 0) throw std::invalid_argument("eval_f: eta must be nonzero");
  CoeffValue F = eval_F(key, point);
  if (!F.finite) return F;
  Rational scale = (key.K % 2 == 1) ? Rational(1) : Rational(-1);  // (-1)^{K-1}
  Rational eta_pow = 1;
  for (int i = 0; i < key.I; ++i) eta_pow *= point.eta;
  return {scale * F.value / eta_pow, true};
}

CoeffValue CoeffEngine::eval_g(const CoeffKey& key, const EvalPoint& point) const {
  if (point.eta == 0) throw std::invalid_argument("eval_g: eta must be nonzero");
  CoeffValue G = eval_G(key, point);
  if (!G.finite) return G;
  Rational scale = (key.K % 2 == 0) ? Rational(2) : Rational(-2);  // 2(-1)^K
  Rational eta_pow = 1;
  for (int i = 0; i < key.I; ++i) eta_pow *= point.eta;
  return {scale * G.value / eta_pow, true};
}

CoeffValue CoeffEngine::eval_H_expansion(int I, const EvalPoint& point) const {
  if (static_cast<int>(point.phis.size()) != I)
    throw std::invalid_argument("eval_H_expansion: phis length does not match I");
  if (I < 1) throw std::invalid_argument("eval_H_expansion: need I >= 1");
  // Lattice paths k_0 = k_I = 0, |k_i - k_{i+1}| <= 1, k_i >= 1 for 0 < i < I.
  std::vector<std::vector<int>> paths;
  std::vector<int> k{0};
  std::function<void()> extend = [&]() {
    int i = static_cast<int>(k.size()) - 1;
    if (i == I) {
      if (k.back() == 0) paths.push_back(k);
      return;
    }
    for (int d = -1; d <= 1; ++d) {
      int next = k.back() + d;
      bool interior = (i + 1 < I);
      if (interior ? next < 1 : next != 0) continue;
      k.push_back(next);
      extend();
      k.pop_back();
    }
  };
  extend();

  std::vector<int> idx(I);
  std::iota(idx.begin(), idx.end(), 0);
  Rational total = 0;
  BigInt nperm = 0;
  do {
    ++nperm;
    for (const auto& path : paths) {
      // step weights between levels 1..I-1; the level-0 step carries no
      // weight (this is what makes I = 1 come out as 1)
      Rational term = 1;
      for (int i = 1; i <= I - 1; ++i)
        term *= Rational(2 - std::abs(path[i + 1] - path[i]));
      Rational prefix_sum = 0;
      bool pole = false;
      for (int i = 1; i <= I - 1; ++i) {
        prefix_sum += point.phis[idx[i - 1]];
        Rational denom = Rational(path[i]) * point.eta - prefix_sum;
        if (denom == 0) {
          pole = true;
          break;
        }
        term *= Rational(path[i]) / denom;
      }
      if (pole) return {Rational(0), false};
      total += term;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return {total / Rational(nperm), true};
}

namespace {
bool subset_sum_hits(const EvalPoint& point, int b_max) {
  const int I = static_cast<int>(point.phis.size());
  for (unsigned mask = 1; mask < (1u << I); ++mask) {
    int b = __builtin_popcount(mask);
    if (b > b_max) continue;
    Rational s = 0;
    for (int i = 0; i < I; ++i)
      if (mask & (1u << i)) s += point.phis[i];
    if (s == point.eta) return true;
  }
  return false;
}
}  // namespace

bool CoeffEngine::singularity_support_F(const CoeffKey& key, const EvalPoint& point) {
  return subset_sum_hits(point, key.I - 1);
}

bool CoeffEngine::singularity_support_G(const CoeffKey& key, const EvalPoint& point) {
  return subset_sum_hits(point, key.I);
}

std::optional<Rational> symmetric_product(const SymFn& p, int I, const SymFn& q, int J,
                                          const EvalPoint& point) {
  if (static_cast<int>(point.phis.size()) != I + J)
    throw std::invalid_argument("symmetric_product: phis length must be I + J");
  std::vector<int> idx(I + J);
  std::iota(idx.begin(), idx.end(), 0);
  Rational total = 0;
  BigInt count = 0;
  std::vector<Rational> left(I), right(J);
  do {
    for (int i = 0; i < I; ++i) left[i] = point.phis[idx[i]];
    for (int j = 0; j < J; ++j) right[j] = point.phis[idx[I + j]];
    auto pv = p(point.eta, left);
    if (!pv) return std::nullopt;
    auto qv = q(point.eta, right);
    if (!qv) return std::nullopt;
    total += *pv * *qv;
    ++count;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return total / Rational(count);
}

IdentityReport check_convolution_identities(int I, int K, int k, int trials,
                                            uint64_t seed) {
  if (!(0 < k && k < K && K <= I))
    throw std::invalid_argument("check_convolution_identities: need 0 < k < K <= I");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  auto rand_rational = [&]() { return Rational(num(rng), den(rng)); };

  IdentityReport report;
  report.requested = trials;
  int attempts = 0;
  while (report.checked < trials && attempts < 50 * trials) {
    ++attempts;
    EvalPoint point;
    point.eta = rand_rational();
    for (int i = 0; i < I; ++i) point.phis.push_back(rand_rational());

    // One memoized core per point; F and G are symmetric, so the symmetric
    // products reduce to subset averages.
    Core<Rational> core(point.eta);
    auto lhs_F = core.F(K, point.phis);
    auto lhs_G = core.G(K, point.phis);
    if (!lhs_F || !lhs_G) continue;

    bool skip = false;
    Rational rhs_F = 0, rhs_G = 0;
    std::vector<Rational> sub, rest;
    for (unsigned mask = 0; mask < (1u << I) && !skip; ++mask) {
      sub.clear();
      rest.clear();
      for (int j = 0; j < I; ++j)
        ((mask >> j) & 1 ? sub : rest).push_back(point.phis[j]);
      int i = static_cast<int>(sub.size());
      // binomial weight: the subset average of F_{i,k} (.) G_{I-i,K-k}
      BigInt choose = 1;
      for (int m = 0; m < i; ++m) choose = choose * (I - m) / (m + 1);
      Rational w = Rational(1) / Rational(choose);
      auto g_rest = core.G(K - k, rest);
      if (!g_rest) {
        skip = true;
        break;
      }
      if (k <= i) {
        auto f_sub = core.F(k, sub);
        if (!f_sub) {
          skip = true;
          break;
        }
        rhs_F += w * *f_sub * *g_rest;
      }
      auto g_sub = core.G(k, sub);
      if (!g_sub) {
        skip = true;
        break;
      }
      rhs_G += w * *g_sub * *g_rest;
    }
    if (skip) continue;

    if (rhs_F != *lhs_F) report.violations.push_back({"F", point});
    if (rhs_G != *lhs_G) report.violations.push_back({"G", point});
    ++report.checked;
  }
  return report;
}

}  // namespace wvn
