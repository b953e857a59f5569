#pragma once

// Exact rational scalars. Every payment, utility level, weight and cost in the
// library is a Rational; no floating point is used anywhere.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace posvcg {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(Integer(num), Integer(den));
}

/// "p/q" or "p" in lowest terms, denominator positive.
inline std::string to_string(const Rational& r) {
  const Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Parses "p", "-p", "p/q". Rejects decimal points, exponents, zero
/// denominators and stray characters.
inline std::optional<Rational> parse_rational(std::string_view text) {
  auto is_integer = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
      return std::isdigit(c) != 0;
    });
  };
  auto to_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    return Integer(std::string(s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!is_integer(text)) return std::nullopt;
    return Rational(to_int(text));
  }
  const auto num = text.substr(0, slash);
  const auto den = text.substr(slash + 1);
  if (!is_integer(num) || den.empty() ||
      !std::all_of(den.begin(), den.end(),
                   [](unsigned char c) { return std::isdigit(c) != 0; })) {
    return std::nullopt;
  }
  const Integer d = to_int(den);
  if (d == 0) return std::nullopt;
  return Rational(to_int(num), d);
}

inline std::strong_ordering compare(const Rational& a, const Rational& b) {
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

inline int sign(const Rational& r) { return r.sign(); }

inline Integer floor(const Rational& r) {
  const Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  Integer q = num / den;  // truncates toward zero
  if (num % den != 0 && num < 0) q -= 1;
  return q;
}

namespace detail {

// Simplest rational strictly inside (lo, hi) with 0 <= lo < hi; hi may be
// unbounded.
inline Rational simplest_in_open_nonneg(const Rational& lo, const std::optional<Rational>& hi) {
  const Integer next = floor(lo) + 1;
  if (!hi || Rational(next) < *hi) return Rational(next);
  // lo and hi share the same integer part n, hi - n in (0, 1].
  const Integer n = floor(lo);
  const Rational lo_frac = lo - Rational(n);
  const Rational hi_frac = *hi - Rational(n);
  // x = n + 1/y with y in (1/hi_frac, 1/lo_frac)
  std::optional<Rational> upper;
  if (lo_frac != 0) upper = 1 / lo_frac;
  const Rational y = simplest_in_open_nonneg(1 / hi_frac, upper);
  return Rational(n) + 1 / y;
}

}  // namespace detail

/// Simplest rational (smallest denominator, then smallest magnitude) in the
/// open interval (lo, hi). Either bound may be absent. Requires lo < hi.
inline Rational simplest_between(const std::optional<Rational>& lo,
                                 const std::optional<Rational>& hi) {
  if ((!lo || *lo < 0) && (!hi || *hi > 0)) return Rational(0);
  if (lo && *lo >= 0) return detail::simplest_in_open_nonneg(*lo, hi);
  // Entire interval is negative: mirror.
  std::optional<Rational> mirrored_hi;
  if (lo) mirrored_hi = -*lo;
  return -detail::simplest_in_open_nonneg(-*hi, mirrored_hi);
}

}  // namespace posvcg
