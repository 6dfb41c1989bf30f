#include "wvn/phase_sets.hpp"

#include <algorithm>
#include <functional>

namespace wvn {

PhaseSet sumset(const PhaseSet& a, const PhaseSet& b) {
  PhaseSet out;
  for (const auto& x : a.phases)
    for (const auto& y : b.phases) out.phases.insert(x + y);
  return out;
}

std::vector<Representation> represent(const Rational& eta, const PhaseSet& a,
                                      int max_terms) {
  std::vector<Phase> pool(a.phases.begin(), a.phases.end());
  std::vector<Representation> found;
  Representation current;
  // Depth-first over nondecreasing index sequences, so every multiset is
  // produced exactly once in canonical order.
  std::function<void(size_t, Rational)> dfs = [&](size_t start, Rational rem) {
    if (rem == 0 && !current.empty()) found.push_back(current);
    if (static_cast<int>(current.size()) >= max_terms) return;
    for (size_t i = start; i < pool.size(); ++i) {
      current.push_back(pool[i]);
      dfs(i, rem - pool[i]);
      current.pop_back();
    }
  };
  dfs(0, eta);
  return found;
}

ResonanceSet build_resonance_set(const PhaseSet& a, int p) {
  ResonanceSet out;
  out.order = p;
  if (p <= 1 || a.empty()) return out;
  for (const auto& rep : represent(Rational(0), a, p - 1))
    out.zero_energy_representations.push_back(rep);
  // Every eta realized by <= p-1 terms; keep eta > 0 representatives only
  // (the sets are symmetric, so negative eta carries no extra energies).
  PhaseSet level = a;
  std::set<Phase> etas;
  for (int k = 1; k <= p - 1; ++k) {
    for (const auto& eta : level.phases)
      if (eta > 0) etas.insert(eta);
    if (k < p - 1) level = sumset(level, a);
  }
  for (const auto& eta : etas) {
    Rational energy = eta * eta / 4;
    out.energies[energy] = represent(eta, a, p - 1);
  }
  return out;
}

BigInt distinct_permutations(const Representation& rep) {
  BigInt total = 1;
  for (size_t i = 2; i <= rep.size(); ++i) total *= i;
  size_t i = 0;
  while (i < rep.size()) {
    size_t j = i;
    while (j < rep.size() && rep[j] == rep[i]) ++j;
    BigInt fact = 1;
    for (size_t m = 2; m <= j - i; ++m) fact *= m;
    total /= fact;
    i = j;
  }
  return total;
}

}  // namespace wvn
