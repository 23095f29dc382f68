#pragma once

#include <algorithm>
#include <compare>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jetvar/core/rational.hpp"

namespace jetvar {

enum class SymbolKind {
  base,
  fibre,
  jet,
  vertical,
  momentum,
  vertical_momentum,
  parameter,
};

inline std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::base: return "base-coordinate";
    case SymbolKind::fibre: return "fibre-coordinate";
    case SymbolKind::jet: return "jet-coordinate";
    case SymbolKind::vertical: return "vertical-coordinate";
    case SymbolKind::momentum: return "momentum";
    case SymbolKind::vertical_momentum: return "vertical-momentum";
    case SymbolKind::parameter: return "parameter";
  }
  return "?";
}

inline bool is_vertical(SymbolKind kind) {
  return kind == SymbolKind::vertical || kind == SymbolKind::vertical_momentum;
}

/// A named coordinate or parameter. Identity is the name; `order` is the jet order
/// (0 for non-jet symbols) and only influences the canonical term order.
class Symbol {
 public:
  Symbol() = default;
  Symbol(std::string name, SymbolKind kind, int order = 0)
      : name_(std::move(name)), kind_(kind), order_(order) {}

  static Symbol base(std::string name) { return {std::move(name), SymbolKind::base}; }
  static Symbol fibre(std::string name) { return {std::move(name), SymbolKind::fibre}; }
  static Symbol parameter(std::string name) { return {std::move(name), SymbolKind::parameter}; }

  const std::string& name() const noexcept { return name_; }
  SymbolKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }

  friend bool operator==(const Symbol& a, const Symbol& b) { return a.name_ == b.name_; }

 private:
  std::string name_;
  SymbolKind kind_ = SymbolKind::parameter;
  int order_ = 0;
};

/// Canonical order of symbols inside monomials and sums: field coordinates before base
/// coordinates before parameters; higher jet order first; plain before vertical.
inline int compare(const Symbol& a, const Symbol& b) {
  auto group = [](SymbolKind k) {
    switch (k) {
      case SymbolKind::base: return 1;
      case SymbolKind::parameter: return 2;
      default: return 0;
    }
  };
  if (int d = group(a.kind()) - group(b.kind()); d != 0) return d < 0 ? -1 : 1;
  if (a.order() != b.order()) return a.order() > b.order() ? -1 : 1;
  const bool va = is_vertical(a.kind());
  const bool vb = is_vertical(b.kind());
  if (va != vb) return va ? 1 : -1;
  int c = a.name().compare(b.name());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

enum class Op { constant, symbol, pi, add, mul, pow, func };

enum class Fn { sin, cos, tan, exp, ln, sqrt };

inline std::string_view to_string(Fn fn) {
  switch (fn) {
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::tan: return "tan";
    case Fn::exp: return "exp";
    case Fn::ln: return "ln";
    case Fn::sqrt: return "sqrt";
  }
  return "?";
}

class Expr;

namespace detail {
struct Node;
}

/// Immutable expression handle. Copies share structure; nodes are never mutated after
/// construction, so expressions are safe to share between threads.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(Rational value);  // NOLINT(google-explicit-constructor)
  Expr(Symbol symbol);  // NOLINT(google-explicit-constructor)

  static Expr constant(Rational value);
  static Expr symbol(Symbol s);
  static Expr pi();
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr pow(Expr base, Rational exponent);
  static Expr func(Fn fn, Expr argument);

  Op op() const;
  const Rational& value() const;        // constant
  const Symbol& sym() const;            // symbol
  const std::vector<Expr>& args() const;  // add, mul terms; pow base; func argument
  const Rational& exponent() const;     // pow
  Fn fn() const;                        // func

  const Expr& base() const { return args().front(); }
  const Expr& argument() const { return args().front(); }

  bool is_constant() const { return op() == Op::constant; }
  bool is_zero() const { return is_constant() && value() == 0; }
  bool is_one() const { return is_constant() && value() == 1; }

  /// True if both handles refer to the same node.
  bool same_node(const Expr& other) const { return node_ == other.node_; }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  Op op = Op::constant;
  Rational value;
  Symbol symbol;
  std::vector<Expr> args;
  Rational exponent;
  Fn fn = Fn::sin;
};

inline const std::shared_ptr<const Node>& zero_node() {
  static const auto node = std::make_shared<const Node>();
  return node;
}
}  // namespace detail

inline Expr::Expr() : node_(detail::zero_node()) {}
inline Expr::Expr(long value) : Expr(constant(Rational(value))) {}
inline Expr::Expr(Rational value) : Expr(constant(std::move(value))) {}
inline Expr::Expr(Symbol symbol) : Expr(Expr::symbol(std::move(symbol))) {}

inline Expr Expr::constant(Rational value) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::constant;
  n->value = std::move(value);
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline Expr Expr::symbol(Symbol s) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::symbol;
  n->symbol = std::move(s);
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline Expr Expr::pi() {
  static const Expr value = [] {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::pi;
    return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
  }();
  return value;
}

inline Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(0L);
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<detail::Node>();
  n->op = Op::add;
  n->args = std::move(terms);
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1L);
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<detail::Node>();
  n->op = Op::mul;
  n->args = std::move(factors);
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline Expr Expr::pow(Expr base, Rational exponent) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::pow;
  n->args = {std::move(base)};
  n->exponent = std::move(exponent);
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline Expr Expr::func(Fn fn, Expr argument) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::func;
  n->fn = fn;
  n->args = {std::move(argument)};
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline Op Expr::op() const { return node_->op; }
inline const Rational& Expr::value() const { return node_->value; }
inline const Symbol& Expr::sym() const { return node_->symbol; }
inline const std::vector<Expr>& Expr::args() const { return node_->args; }
inline const Rational& Expr::exponent() const { return node_->exponent; }
inline Fn Expr::fn() const { return node_->fn; }

// Raw builders. These never simplify; `normalize` produces canonical form.
inline Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
inline Expr operator-(const Expr& a) { return Expr::mul({Expr(-1L), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
inline Expr operator/(const Expr& a, const Expr& b) { return a * Expr::pow(b, -1); }
inline Expr pow(const Expr& base, Rational exponent) { return Expr::pow(base, std::move(exponent)); }
inline Expr sin(const Expr& a) { return Expr::func(Fn::sin, a); }
inline Expr cos(const Expr& a) { return Expr::func(Fn::cos, a); }
inline Expr tan(const Expr& a) { return Expr::func(Fn::tan, a); }
inline Expr exp(const Expr& a) { return Expr::func(Fn::exp, a); }
inline Expr ln(const Expr& a) { return Expr::func(Fn::ln, a); }
inline Expr sqrt(const Expr& a) { return Expr::func(Fn::sqrt, a); }

namespace detail {
inline int op_rank(Op op) {
  switch (op) {
    case Op::symbol: return 0;
    case Op::pi: return 1;
    case Op::func: return 2;
    case Op::pow: return 3;
    case Op::mul: return 4;
    case Op::add: return 5;
    case Op::constant: return 6;
  }
  return 7;
}

inline int sign(int c) { return c < 0 ? -1 : (c > 0 ? 1 : 0); }
}  // namespace detail

/// Structural total order. On normalized expressions this is the canonical order of atoms.
inline int compare(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return 0;
  if (a.op() != b.op()) return detail::op_rank(a.op()) < detail::op_rank(b.op()) ? -1 : 1;
  switch (a.op()) {
    case Op::constant:
      return a.value() < b.value() ? -1 : (b.value() < a.value() ? 1 : 0);
    case Op::symbol:
      return compare(a.sym(), b.sym());
    case Op::pi:
      return 0;
    case Op::func:
      if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
      return compare(a.argument(), b.argument());
    case Op::pow:
      if (int c = compare(a.base(), b.base()); c != 0) return c;
      return a.exponent() < b.exponent() ? -1 : (b.exponent() < a.exponent() ? 1 : 0);
    case Op::add:
    case Op::mul: {
      const auto& x = a.args();
      const auto& y = b.args();
      for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (int c = compare(x[i], y[i]); c != 0) return c;
      }
      return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
    }
  }
  return 0;
}

/// Structural equality (not mathematical equivalence).
inline bool identical(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct SymbolNameLess {
  bool operator()(const Symbol& a, const Symbol& b) const { return a.name() < b.name(); }
};

using SymbolSet = std::set<Symbol, SymbolNameLess>;

inline void collect_symbols(const Expr& e, SymbolSet& out) {
  if (e.op() == Op::symbol) {
    out.insert(e.sym());
    return;
  }
  for (const auto& a : e.args()) collect_symbols(a, out);
}

inline SymbolSet free_symbols(const Expr& e) {
  SymbolSet out;
  collect_symbols(e, out);
  return out;
}

inline bool contains_symbol(const Expr& e, const std::string& name) {
  if (e.op() == Op::symbol) return e.sym().name() == name;
  return std::any_of(e.args().begin(), e.args().end(),
                     [&](const Expr& a) { return contains_symbol(a, name); });
}

}  // namespace jetvar
