#pragma once

#include <string>
#include <vector>

#include "jetvar/core/expr.hpp"

namespace jetvar {

namespace detail {

enum Precedence { prec_add = 1, prec_neg = 2, prec_mul = 3, prec_pow = 4, prec_atom = 5 };

// Leading negative constant of a product or a negative constant, if any.
inline bool is_negative_term(const Expr& e) {
  if (e.is_constant()) return e.value() < 0;
  if (e.op() == Op::mul && !e.args().empty() && e.args().front().is_constant()) {
    return e.args().front().value() < 0;
  }
  return false;
}

inline Expr negate_term(const Expr& e) {
  if (e.is_constant()) return Expr(Rational(-e.value()));
  std::vector<Expr> factors = e.args();
  Rational c = -factors.front().value();
  if (c == 1) {
    factors.erase(factors.begin());
  } else {
    factors.front() = Expr(c);
  }
  return Expr::mul(std::move(factors));
}

class TextPrinter {
 public:
  std::string print(const Expr& e, int parent = 0) const {
    int own = 0;
    std::string s = print_raw(e, own);
    if (own < parent) return "(" + s + ")";
    return s;
  }

 private:
  std::string print_raw(const Expr& e, int& prec) const {
    switch (e.op()) {
      case Op::constant: {
        const Rational& q = e.value();
        prec = q < 0 ? prec_neg : (is_integer(q) ? prec_atom : prec_mul);
        return to_string(q);
      }
      case Op::symbol:
        prec = prec_atom;
        return e.sym().name();
      case Op::pi:
        prec = prec_atom;
        return "pi";
      case Op::func:
        prec = prec_atom;
        return std::string(to_string(e.fn())) + "(" + print(e.argument()) + ")";
      case Op::add:
        prec = prec_add;
        return print_sum(e);
      case Op::pow:
        if (e.exponent() < 0) return print_product({e}, prec);
        return print_power(e, prec);
      case Op::mul:
        return print_product(e.args(), prec);
    }
    return {};
  }

  std::string print_sum(const Expr& e) const {
    std::string out;
    bool first = true;
    for (const auto& t : e.args()) {
      if (first) {
        out += print(t, prec_add);
        first = false;
      } else if (is_negative_term(t)) {
        out += " - " + print(negate_term(t), prec_mul);
      } else {
        out += " + " + print(t, prec_mul);
      }
    }
    return out;
  }

  std::string print_power(const Expr& e, int& prec) const {
    prec = prec_pow;
    const Rational& q = e.exponent();
    if (q == Rational(1, 2)) {
      prec = prec_atom;
      return "sqrt(" + print(e.base()) + ")";
    }
    std::string base = print(e.base(), prec_atom);
    if (is_integer(q) && q > 0) return base + "^" + to_string(q);
    return base + "^(" + to_string(q) + ")";
  }

  std::string print_product(const std::vector<Expr>& factors, int& prec) const {
    std::vector<std::string> numerator;
    std::vector<std::string> denominator;
    bool negative = false;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const Expr& f = factors[i];
      if (i == 0 && f.is_constant() && f.value() < 0) {
        negative = true;
        if (f.value() != -1 || factors.size() == 1) numerator.push_back(to_string(Rational(-f.value())));
        continue;
      }
      if (f.op() == Op::pow && f.exponent() < 0) {
        Expr inverse = -f.exponent() == 1 ? f.base() : Expr::pow(f.base(), -f.exponent());
        denominator.push_back(print(inverse, prec_pow));
        continue;
      }
      numerator.push_back(print(f, prec_mul));
    }
    std::string out;
    if (numerator.empty()) out = "1";
    for (std::size_t i = 0; i < numerator.size(); ++i) {
      if (i != 0) out += "*";
      out += numerator[i];
    }
    for (const auto& d : denominator) out += "/" + d;
    prec = prec_mul;
    if (negative) {
      prec = prec_neg;
      out = "-" + out;
    }
    return out;
  }
};

}  // namespace detail

/// Renders an expression in the model-file syntax; the output parses back to the same tree
/// up to normalization.
inline std::string to_string(const Expr& e) { return detail::TextPrinter{}.print(e); }

}  // namespace jetvar
