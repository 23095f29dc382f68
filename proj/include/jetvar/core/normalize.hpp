#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "jetvar/core/expr.hpp"

namespace jetvar {

Expr normalize(const Expr& e);

namespace detail {

// Canonical form is a distributed polynomial whose "variables" are atoms: symbols, pi,
// function applications with normalized arguments, and opaque powers (sums raised to
// negative or fractional exponents, constants raised to fractional exponents).

struct Factor {
  Expr base;
  Rational exponent;
};

using Monomial = std::vector<Factor>;

/// Term order: lexicographic over the sorted factor lists; earlier atoms and higher
/// exponents first, the constant monomial last.
inline int compare_monomials(const Monomial& a, const Monomial& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i].base, b[i].base); c != 0) return c;
    if (a[i].exponent != b[i].exponent) return a[i].exponent > b[i].exponent ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() > b.size() ? -1 : 1;
}

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b) < 0; }
};

using Poly = std::map<Monomial, Rational, MonomialLess>;

inline void accumulate(Poly& into, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = into.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) into.erase(it);
  }
}

inline void accumulate(Poly& into, const Poly& p, const Rational& scale = 1) {
  for (const auto& [m, c] : p) accumulate(into, m, c * scale);
}

inline Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].base, b[j].base) < 0)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || compare(b[j].base, a[i].base) < 0) {
      out.push_back(b[j++]);
    } else {
      Rational e = a[i].exponent + b[j].exponent;
      if (e != 0) out.push_back({a[i].base, std::move(e)});
      ++i;
      ++j;
    }
  }
  return out;
}

inline Poly constant_poly(const Rational& c) {
  Poly p;
  if (c != 0) p.emplace(Monomial{}, c);
  return p;
}

inline Poly atom_poly(const Expr& atom, const Rational& exponent = 1) {
  Poly p;
  p.emplace(Monomial{{atom, exponent}}, Rational(1));
  return p;
}

inline Expr monomial_expr(const Rational& c, const Monomial& m) {
  std::vector<Expr> factors;
  factors.reserve(m.size() + 1);
  if (c != 1 || m.empty()) factors.emplace_back(c);
  for (const auto& f : m) {
    factors.push_back(f.exponent == 1 ? f.base : Expr::pow(f.base, f.exponent));
  }
  return Expr::mul(std::move(factors));
}

inline Expr poly_expr(const Poly& p) {
  if (p.empty()) return Expr(0L);
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p) terms.push_back(monomial_expr(c, m));
  return Expr::add(std::move(terms));
}

Poly to_poly(const Expr& e);
Poly power(const Poly& p, const Rational& q);

// A factor is unsettled when its exponent lets it be expanded back into ordinary
// monomials, e.g. after merging sqrt(y+1)*sqrt(y+1) -> (y+1)^1.
inline bool unsettled(const Factor& f) {
  const Op op = f.base.op();
  if (op == Op::constant && f.base.is_zero()) return false;
  if (!is_integer(f.exponent)) return false;
  if (op == Op::constant || op == Op::mul || op == Op::pow) return true;
  return op == Op::add && f.exponent > 0;
}

inline Poly settle(Poly p) {
  bool changed = true;
  while (changed) {
    changed = false;
    Poly next;
    for (const auto& [m, c] : p) {
      auto it = std::find_if(m.begin(), m.end(), unsettled);
      if (it == m.end()) {
        accumulate(next, m, c);
        continue;
      }
      changed = true;
      Monomial rest;
      for (auto f = m.begin(); f != m.end(); ++f) {
        if (f != it) rest.push_back(*f);
      }
      Poly expanded = power(to_poly(it->base), it->exponent);
      for (const auto& [em, ec] : expanded) accumulate(next, multiply(rest, em), ec * c);
    }
    p = std::move(next);
  }
  return p;
}

inline Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  bool needs_settle = false;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m = multiply(ma, mb);
      needs_settle = needs_settle || std::any_of(m.begin(), m.end(), unsettled);
      accumulate(out, m, ca * cb);
    }
  }
  return needs_settle ? settle(std::move(out)) : out;
}

inline Poly opaque_power(const Poly& p, const Rational& q) { return atom_poly(poly_expr(p), q); }

inline Poly power(const Poly& p, const Rational& q) {
  if (q == 0) {
    if (p.empty()) return atom_poly(Expr(0L), q);
    return constant_poly(1);
  }
  if (p.empty()) {
    if (q > 0) return {};
    return atom_poly(Expr(0L), q);
  }
  if (p.size() == 1) {
    const auto& [m, c] = *p.begin();
    if (is_integer(q)) {
      const long k = numerator(q).convert_to<long>();
      Monomial out;
      for (const auto& f : m) out.push_back({f.base, f.exponent * q});
      Poly r;
      r.emplace(std::move(out), jetvar::pow(c, k));
      return settle(std::move(r));
    }
    const bool distributable =
        c > 0 && std::all_of(m.begin(), m.end(),
                             [](const Factor& f) { return f.exponent == 1 || !is_integer(f.exponent); });
    if (!distributable) return opaque_power(p, q);
    Monomial out;
    Rational coefficient = 1;
    if (c != 1) {
      if (auto root = exact_rational_power(c, q)) {
        coefficient = *root;
      } else {
        out.push_back({Expr(c), q});
      }
    }
    for (const auto& f : m) out.push_back({f.base, f.exponent * q});
    std::sort(out.begin(), out.end(), [](const Factor& a, const Factor& b) { return compare(a.base, b.base) < 0; });
    Poly r;
    r.emplace(std::move(out), coefficient);
    return settle(std::move(r));
  }
  if (is_integer(q) && q > 0) {
    auto k = numerator(q).convert_to<unsigned long>();
    Poly result = constant_poly(1);
    Poly base = p;
    while (k != 0) {
      if (k & 1UL) result = multiply(result, base);
      k >>= 1;
      if (k != 0) base = multiply(base, base);
    }
    return result;
  }
  return opaque_power(p, q);
}

/// q when `e` is the normalized form of q*pi.
inline std::optional<Rational> pi_multiple(const Expr& e) {
  if (e.op() == Op::pi) return Rational(1);
  if (e.op() == Op::mul && e.args().size() == 2 && e.args()[0].is_constant() && e.args()[1].op() == Op::pi) {
    return e.args()[0].value();
  }
  return std::nullopt;
}

inline Poly function_poly(Fn fn, const Expr& argument) {
  Expr arg = normalize(argument);
  if (fn == Fn::sqrt) return power(to_poly(arg), Rational(1, 2));
  // exact values at multiples of pi/2
  if (auto q = pi_multiple(arg); q && is_integer(2 * *q) && (fn == Fn::sin || fn == Fn::cos || fn == Fn::tan)) {
    Integer k = numerator(2 * *q) % 4;
    if (k < 0) k += 4;
    static constexpr int sin_table[4] = {0, 1, 0, -1};
    const int quarter = k.convert_to<int>();
    const int value = fn == Fn::sin ? sin_table[quarter] : fn == Fn::cos ? sin_table[(quarter + 1) % 4] : 0;
    if (value != 0) return constant_poly(value);
    if (fn != Fn::tan || quarter % 2 == 0) return {};
  }
  if (arg.is_zero()) {
    switch (fn) {
      case Fn::sin:
      case Fn::tan: return {};
      case Fn::cos:
      case Fn::exp: return constant_poly(1);
      default: break;
    }
  }
  if (fn == Fn::ln && arg.is_one()) return {};
  return atom_poly(Expr::func(fn, std::move(arg)));
}

inline Poly to_poly(const Expr& e) {
  switch (e.op()) {
    case Op::constant:
      return constant_poly(e.value());
    case Op::symbol:
    case Op::pi:
      return atom_poly(e);
    case Op::add: {
      Poly out;
      for (const auto& t : e.args()) accumulate(out, to_poly(t));
      return out;
    }
    case Op::mul: {
      Poly out = constant_poly(1);
      for (const auto& f : e.args()) {
        if (out.empty()) break;
        out = multiply(out, to_poly(f));
      }
      return out;
    }
    case Op::pow:
      return power(to_poly(e.base()), e.exponent());
    case Op::func:
      return function_poly(e.fn(), e.argument());
  }
  return {};
}

}  // namespace detail

/// Canonical expanded form: a sum of monomials in canonical term order, each a rational
/// coefficient times sorted atom powers. Idempotent.
inline Expr normalize(const Expr& e) { return detail::poly_expr(detail::to_poly(e)); }

/// Number of top-level terms of a normalized expression.
inline std::size_t term_count(const Expr& normalized) {
  if (normalized.is_zero()) return 0;
  return normalized.op() == Op::add ? normalized.args().size() : 1;
}

}  // namespace jetvar
