#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "jetvar/core/error.hpp"

namespace jetvar {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Integer& n) { return n.str(); }

inline std::string to_string(const Rational& q) {
  if (is_integer(q)) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Integer power with a signed exponent; q must be nonzero when k < 0.
inline Rational pow(const Rational& q, long k) {
  Rational base = k < 0 ? Rational(1) / q : q;
  unsigned long e = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  Rational result = 1;
  while (e != 0) {
    if (e & 1UL) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

/// Exact k-th root of a nonnegative integer, if one exists.
inline std::optional<Integer> exact_root(const Integer& n, unsigned k) {
  if (n < 0) return std::nullopt;
  if (n < 2 || k == 1) return n;
  // Bisection on [0, 2^(bits/k + 1)].
  const auto bits = boost::multiprecision::msb(n) + 1;
  Integer lo = 0;
  Integer hi = Integer(1) << (bits / k + 1);
  while (lo < hi) {
    Integer mid = (lo + hi + 1) / 2;
    if (boost::multiprecision::pow(mid, k) <= n) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  if (boost::multiprecision::pow(lo, k) == n) return lo;
  return std::nullopt;
}

/// Exact value of q^(p/r) for positive q when both numerator and denominator are perfect r-th powers.
inline std::optional<Rational> exact_rational_power(const Rational& q, const Rational& exponent) {
  if (q <= 0) return std::nullopt;
  const Integer r = denominator(exponent);
  if (r > 64) return std::nullopt;
  const auto k = r.convert_to<unsigned>();
  auto num_root = exact_root(numerator(q), k);
  auto den_root = exact_root(denominator(q), k);
  if (!num_root || !den_root) return std::nullopt;
  const Integer p = numerator(exponent);
  if (abs(p) > 4096) return std::nullopt;
  return pow(Rational(*num_root, *den_root), p.convert_to<long>());
}

/// Parses a decimal literal such as "12", "0.5", "1.25e-3" into the exact rational it denotes.
inline Rational parse_decimal(std::string_view text) {
  Integer mantissa = 0;
  long scale = 0;
  std::size_t i = 0;
  bool digits = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    mantissa = mantissa * 10 + (text[i] - '0');
    digits = true;
  }
  if (i < text.size() && text[i] == '.') {
    for (++i; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      mantissa = mantissa * 10 + (text[i] - '0');
      --scale;
      digits = true;
    }
  }
  if (!digits) throw Error("malformed number '" + std::string(text) + "'");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    long e = 0;
    bool exp_digits = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      e = e * 10 + (text[i] - '0');
      exp_digits = true;
      if (e > 100000) throw Error("exponent out of range in '" + std::string(text) + "'");
    }
    if (!exp_digits) throw Error("malformed number '" + std::string(text) + "'");
    scale += negative ? -e : e;
  }
  if (i != text.size()) throw Error("malformed number '" + std::string(text) + "'");
  return Rational(mantissa) * pow(Rational(10), scale);
}

}  // namespace jetvar
