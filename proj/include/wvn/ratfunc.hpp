#pragma once

// Exact truncated Laurent series in eps over Q, used to classify removable
// singularities: re-evaluating a coefficient recurrence at eta + eps and
// letting eps -> 0 separates removable poles from genuine ones. A fixed
// coefficient window past the valuation is kept; pole orders in the
// recurrences are bounded by the phase count, far below the window, so the
// order-zero coefficient (the limit) is always exact.

#include "wvn/rational.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace wvn {

class EpsSeries {
 public:
  static constexpr int kTerms = 32;

  EpsSeries() : zero_(true) {}
  EpsSeries(Rational c) : zero_(c == 0) {  // NOLINT(google-explicit-constructor)
    if (!zero_) {
      val_ = 0;
      c_.assign(kTerms, Rational(0));
      c_[0] = std::move(c);
    }
  }
  static EpsSeries eps() {
    EpsSeries s;
    s.zero_ = false;
    s.val_ = 1;
    s.c_.assign(kTerms, Rational(0));
    s.c_[0] = 1;
    return s;
  }

  bool is_zero() const { return zero_; }

  EpsSeries operator+(const EpsSeries& o) const {
    if (zero_) return o;
    if (o.zero_) return *this;
    int lo = std::min(val_, o.val_);
    EpsSeries r;
    r.zero_ = false;
    r.val_ = lo;
    r.c_.assign(kTerms, Rational(0));
    for (int i = 0; i < kTerms; ++i) {
      int k = lo + i;
      if (k >= val_ && k - val_ < kTerms) r.c_[i] += c_[k - val_];
      if (k >= o.val_ && k - o.val_ < kTerms) r.c_[i] += o.c_[k - o.val_];
    }
    r.normalize();
    return r;
  }
  EpsSeries operator-() const {
    EpsSeries r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  EpsSeries operator-(const EpsSeries& o) const { return *this + (-o); }
  EpsSeries operator*(const EpsSeries& o) const {
    if (zero_ || o.zero_) return EpsSeries();
    EpsSeries r;
    r.zero_ = false;
    r.val_ = val_ + o.val_;
    r.c_.assign(kTerms, Rational(0));
    for (int i = 0; i < kTerms; ++i) {
      if (c_[i] == 0) continue;
      for (int j = 0; i + j < kTerms; ++j) {
        if (o.c_[j] == 0) continue;
        r.c_[i + j] += c_[i] * o.c_[j];
      }
    }
    r.normalize();
    return r;
  }
  EpsSeries operator/(const EpsSeries& o) const {
    if (o.zero_) throw std::domain_error("EpsSeries: division by zero series");
    if (zero_) return EpsSeries();
    // invert o: leading coefficient is nonzero by normalization
    EpsSeries inv;
    inv.zero_ = false;
    inv.val_ = -o.val_;
    inv.c_.assign(kTerms, Rational(0));
    inv.c_[0] = 1 / o.c_[0];
    for (int n = 1; n < kTerms; ++n) {
      Rational s = 0;
      for (int j = 1; j <= n; ++j) s += o.c_[j] * inv.c_[n - j];
      inv.c_[n] = -s / o.c_[0];
    }
    return *this * inv;
  }
  EpsSeries& operator+=(const EpsSeries& o) { return *this = *this + o; }

  /// Value at eps = 0, or nullopt when 0 is a genuine pole.
  std::optional<Rational> limit_at_zero() const {
    if (zero_ || val_ > 0) return Rational(0);
    if (val_ < 0) return std::nullopt;
    return c_[0];
  }

 private:
  void normalize() {
    int shift = 0;
    while (shift < kTerms && c_[shift] == 0) ++shift;
    if (shift == kTerms) {
      // cancelled past the window: true valuation >= val_ + kTerms, which is
      // positive for every pole order arising here, so the limit is 0
      zero_ = true;
      c_.clear();
      return;
    }
    if (shift > 0) {
      c_.erase(c_.begin(), c_.begin() + shift);
      c_.resize(kTerms, Rational(0));
      val_ += shift;
    }
  }

  bool zero_ = true;
  int val_ = 0;
  std::vector<Rational> c_;
};

}  // namespace wvn
