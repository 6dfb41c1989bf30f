#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace wvn {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "num", "num/den" or a plain decimal like "0.45" into an exact rational.
inline Rational parse_rational(const std::string& s) {
  auto bad = [&]() -> std::runtime_error {
    return std::runtime_error("cannot parse rational: '" + s + "'");
  };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(s.substr(0, slash));
      BigInt den(s.substr(slash + 1));
      if (den == 0) throw bad();
      return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      bool neg = !digits.empty() && digits[0] == '-';
      if (neg) digits = digits.substr(1);
      if (digits.empty()) throw bad();
      BigInt num(digits);
      BigInt den = 1;
      for (size_t i = 0; i < s.size() - dot - 1; ++i) den *= 10;
      return neg ? Rational(-num, den) : Rational(num, den);
    }
    return Rational(BigInt(s));
  } catch (const std::runtime_error&) {
    throw;
  } catch (...) {
    throw bad();
  }
}

/// Serializes as "num/den" (or "num" when the denominator is 1).
inline std::string format_rational(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

}  // namespace wvn
