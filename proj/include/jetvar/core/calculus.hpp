#pragma once

#include <map>
#include <string>
#include <vector>

#include "jetvar/core/normalize.hpp"

namespace jetvar {

namespace detail {

inline Expr diff_raw(const Expr& e, const std::string& s) {
  switch (e.op()) {
    case Op::constant:
    case Op::pi:
      return Expr(0L);
    case Op::symbol:
      return Expr(e.sym().name() == s ? 1L : 0L);
    case Op::add: {
      std::vector<Expr> terms;
      for (const auto& t : e.args()) terms.push_back(diff_raw(t, s));
      return Expr::add(std::move(terms));
    }
    case Op::mul: {
      std::vector<Expr> terms;
      const auto& f = e.args();
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!contains_symbol(f[i], s)) continue;
        std::vector<Expr> product = f;
        product[i] = diff_raw(f[i], s);
        terms.push_back(Expr::mul(std::move(product)));
      }
      return Expr::add(std::move(terms));
    }
    case Op::pow: {
      if (!contains_symbol(e.base(), s)) return Expr(0L);
      const Rational& q = e.exponent();
      return Expr::mul({Expr(q), Expr::pow(e.base(), q - 1), diff_raw(e.base(), s)});
    }
    case Op::func: {
      const Expr& a = e.argument();
      if (!contains_symbol(a, s)) return Expr(0L);
      Expr inner = diff_raw(a, s);
      switch (e.fn()) {
        case Fn::sin: return cos(a) * inner;
        case Fn::cos: return -(sin(a) * inner);
        case Fn::tan: return Expr::pow(cos(a), -2) * inner;
        case Fn::exp: return exp(a) * inner;
        case Fn::ln: return Expr::pow(a, -1) * inner;
        case Fn::sqrt: return Expr::mul({Expr(Rational(1, 2)), Expr::pow(a, Rational(-1, 2)), inner});
      }
    }
  }
  return Expr(0L);
}

inline Expr substitute_raw(const Expr& e, const std::map<std::string, Expr>& bindings) {
  switch (e.op()) {
    case Op::constant:
    case Op::pi:
      return e;
    case Op::symbol: {
      auto it = bindings.find(e.sym().name());
      return it == bindings.end() ? e : it->second;
    }
    case Op::add:
    case Op::mul: {
      std::vector<Expr> args;
      args.reserve(e.args().size());
      for (const auto& a : e.args()) args.push_back(substitute_raw(a, bindings));
      return e.op() == Op::add ? Expr::add(std::move(args)) : Expr::mul(std::move(args));
    }
    case Op::pow:
      return Expr::pow(substitute_raw(e.base(), bindings), e.exponent());
    case Op::func:
      return Expr::func(e.fn(), substitute_raw(e.argument(), bindings));
  }
  return e;
}

}  // namespace detail

/// Partial derivative with respect to the named symbol, every other symbol held fixed.
inline Expr diff(const Expr& e, const std::string& symbol) {
  return normalize(detail::diff_raw(normalize(e), symbol));
}

inline Expr diff(const Expr& e, const Symbol& s) { return diff(e, s.name()); }

/// Simultaneous substitution: replacements are not themselves rewritten.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  return normalize(detail::substitute_raw(e, bindings));
}

}  // namespace jetvar
