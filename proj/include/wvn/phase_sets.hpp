#pragma once

// Exact phase-sumset arithmetic: the k-fold sumsets of the phase set of a
// potential and the finite set of energies eta^2/4 at which embedded point
// spectrum is possible, together with the representations eta = sum of phases.

#include "wvn/rational.hpp"

#include <map>
#include <set>
#include <vector>

namespace wvn {

using Phase = Rational;

struct PhaseSet {
  std::set<Phase> phases;

  bool is_symmetric() const {
    for (const auto& p : phases)
      if (!phases.count(-p)) return false;
    return true;
  }
  bool empty() const { return phases.empty(); }

  static PhaseSet from_list(const std::vector<Phase>& v) {
    PhaseSet s;
    s.phases.insert(v.begin(), v.end());
    return s;
  }
  /// Closure under negation (real-potential case).
  PhaseSet symmetrized() const {
    PhaseSet s = *this;
    for (const auto& p : phases) s.phases.insert(-p);
    return s;
  }
};

/// {phi + psi : phi in a, psi in b}, deduplicated exactly.
PhaseSet sumset(const PhaseSet& a, const PhaseSet& b);

/// A multiset of phases summing to some eta, stored sorted.
using Representation = std::vector<Phase>;

struct ResonanceSet {
  int order = 0;  // p
  // E > 0 only; each energy maps to all representations found for k <= p-1.
  std::map<Rational, std::vector<Representation>> energies;
  // Representations of eta = 0 (E = 0 never reported as a candidate).
  std::vector<Representation> zero_energy_representations;

  std::vector<Rational> energy_list() const {
    std::vector<Rational> v;
    for (const auto& [e, reps] : energies) v.push_back(e);
    return v;
  }
  bool contains(const Rational& e) const { return energies.count(e) > 0; }
};

/// Candidate embedded-eigenvalue set S_p = {eta^2/4 : eta in union of k-fold
/// sumsets, k <= p-1, eta != 0}, with every representation attached.
/// p = 1 yields the empty set.
ResonanceSet build_resonance_set(const PhaseSet& a, int p);

/// All multisets of at most max_terms phases from `a` summing exactly to eta,
/// each in canonical sorted order. Empty when no representation exists.
std::vector<Representation> represent(const Rational& eta, const PhaseSet& a,
                                      int max_terms);

/// Number of distinct permutations of a sorted multiset (the C1 of the
/// resonant-amplitude formula).
BigInt distinct_permutations(const Representation& rep);

}  // namespace wvn
