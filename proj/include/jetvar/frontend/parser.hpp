#pragma once

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetvar/core/evaluate.hpp"
#include "jetvar/core/normalize.hpp"
#include "jetvar/hamiltonian/hamiltonian.hpp"

namespace jetvar {

enum class ModelKind { lagrangian, equation, hamiltonian };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::lagrangian: return "lagrangian";
    case ModelKind::equation: return "equation";
    case ModelKind::hamiltonian: return "hamiltonian";
  }
  return "?";
}

/// A parsed model file: the atlas and the payload expressions (one density, or the
/// operator components for `equation` models).
struct Model {
  ModelKind kind = ModelKind::lagrangian;
  BundleSpec spec;
  std::vector<Expr> payload;

  Lagrangian lagrangian() const { return make_lagrangian(payload.front(), spec); }
  DifferentialOperator differential_operator() const { return make_operator(payload, spec); }
  HamiltonianSystem hamiltonian() const { return make_hamiltonian(payload.front(), spec); }
};

namespace detail {

/// Recursive-descent parser for one expression line.
///
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?          right-associative, rational exponent
///   primary := number | name | name '(' sum ')' | '(' sum ')'
class ExpressionParser {
 public:
  using Resolver = std::function<Expr(const std::string&, int column)>;

  ExpressionParser(std::string_view text, int line, int column_offset, Resolver resolve)
      : text_(text), line_(line), offset_(column_offset), resolve_(std::move(resolve)) {}

  Expr parse() {
    Expr e = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    std::vector<Expr> terms{product()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(product());
      } else if (accept('-')) {
        terms.push_back(-product());
      } else {
        break;
      }
    }
    return Expr::add(std::move(terms));
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) {
      Expr operand = unary();
      if (operand.is_constant()) return Expr(Rational(-operand.value()));
      return -operand;
    }
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    Expr exponent = normalize(unary());
    if (!exponent.is_constant()) {
      pos_ = at;
      skip_space();
      fail("exponent must be a rational constant");
    }
    return Expr::pow(base, exponent.value());
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    try {
      return Expr(parse_decimal(text_.substr(start, pos_ - start)));
    } catch (const Error& e) {
      pos_ = start;
      fail(e.what());
    }
  }

  Expr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string id(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static constexpr std::pair<std::string_view, Fn> functions[] = {
          {"sin", Fn::sin}, {"cos", Fn::cos}, {"tan", Fn::tan}, {"exp", Fn::exp}, {"ln", Fn::ln}, {"sqrt", Fn::sqrt}};
      for (const auto& [fname, fn] : functions) {
        if (id == fname) {
          ++pos_;
          Expr arg = sum();
          if (!accept(')')) fail("expected ')'");
          return Expr::func(fn, arg);
        }
      }
      pos_ = start;
      fail("unknown function '" + id + "'");
    }
    if (id == "pi") return Expr::pi();
    return resolve_(id, offset_ + static_cast<int>(start) + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int offset_;
  Resolver resolve_;
};

inline std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace detail

/// Parses a constant expression (numbers, pi, functions) such as "pi/2" or "-1.5e-3".
inline double parse_constant(std::string_view text) {
  detail::ExpressionParser parser(text, 0, 0, [](const std::string& id, int) -> Expr {
    throw ParseError("unknown identifier '" + id + "' in constant", 0, 0);
  });
  return eval(parser.parse(), {});
}

/// Parses one expression against an atlas; names resolve as in model files.
inline Expr parse_expression(std::string_view text, const BundleSpec& spec) {
  detail::ExpressionParser parser(text, 1, 0, [&](const std::string& id, int column) -> Expr {
    std::optional<Symbol> s;
    try {
      s = spec.resolve(id);
    } catch (const JetError& e) {
      throw ParseError(e.what(), 1, column);
    }
    if (!s) throw ParseError("unknown identifier '" + id + "'", 1, column);
    return Expr(*s);
  });
  return parser.parse();
}

/// Parses a model file:
///
///   base t                      # one or more base coordinates
///   fibre y                     # one or more fibre coordinates
///   param omega = 1             # optional value
///   lagrangian 0.5*(y_t^2 - omega^2*y^2)
///
/// with exactly one of `lagrangian`, `equation` (repeatable) or `hamiltonian`.
/// `order` overrides the inferred jet order of the atlas.
inline Model parse_model(std::string_view text, std::optional<int> order = std::nullopt) {
  std::optional<std::vector<std::string>> base;
  std::optional<std::vector<std::string>> fibre;
  std::vector<Parameter> params;
  std::optional<ModelKind> kind;
  struct Pending {
    std::string text;
    int line;
    int column;
  };
  std::vector<Pending> bodies;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::string_view line = detail::strip_comment(raw);
    std::size_t p = 0;
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p == line.size()) {
      if (end == text.size()) break;
      continue;
    }
    std::size_t q = p;
    while (q < line.size() && !std::isspace(static_cast<unsigned char>(line[q]))) ++q;
    const std::string keyword(line.substr(p, q - p));
    const std::string_view rest = line.substr(q);
    const int rest_column = static_cast<int>(q);

    auto names = [&](std::string_view s, int column) {
      std::vector<std::string> out;
      std::size_t i = 0;
      while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i == s.size()) break;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        std::string id(s.substr(i, j - i));
        if (id.find('_') != std::string::npos) {
          throw ParseError("name '" + id + "' collides with generated coordinate names", line_no, column + static_cast<int>(i) + 1);
        }
        if (!detail::is_identifier(id)) {
          throw ParseError("invalid identifier '" + id + "'", line_no, column + static_cast<int>(i) + 1);
        }
        out.push_back(std::move(id));
        i = j;
      }
      return out;
    };

    if (keyword == "base" || keyword == "fibre") {
      auto& slot = keyword == "base" ? base : fibre;
      if (slot) throw ParseError("duplicate " + keyword + " declaration", line_no, static_cast<int>(p) + 1);
      if (kind) throw ParseError(keyword + " must be declared before the model", line_no, static_cast<int>(p) + 1);
      slot = names(rest, rest_column);
      if (slot->empty()) throw ParseError(keyword + " needs at least one identifier", line_no, static_cast<int>(q) + 1);
    } else if (keyword == "param") {
      std::string_view decl = rest;
      std::optional<Rational> value;
      if (auto eq = decl.find('='); eq != std::string_view::npos) {
        detail::ExpressionParser vp(decl.substr(eq + 1), line_no, rest_column + static_cast<int>(eq) + 1,
                                    [&](const std::string& id, int column) -> Expr {
                                      throw ParseError("parameter value must be a number, found '" + id + "'", line_no, column);
                                    });
        Expr v = normalize(vp.parse());
        if (!v.is_constant()) {
          throw ParseError("parameter value must be a rational number", line_no, rest_column + static_cast<int>(eq) + 2);
        }
        value = v.value();
        decl = decl.substr(0, eq);
      }
      auto n = names(decl, rest_column);
      if (n.size() != 1) throw ParseError("param declares exactly one name", line_no, static_cast<int>(q) + 1);
      params.push_back({n.front(), value});
    } else if (keyword == "lagrangian" || keyword == "equation" || keyword == "hamiltonian") {
      const ModelKind k = keyword == "lagrangian" ? ModelKind::lagrangian
                          : keyword == "equation" ? ModelKind::equation
                                                  : ModelKind::hamiltonian;
      if (kind && *kind != k) {
        throw ParseError("multiple model kinds: '" + keyword + "' after '" + std::string(to_string(*kind)) + "'", line_no,
                         static_cast<int>(p) + 1);
      }
      if (kind && k != ModelKind::equation) {
        throw ParseError("duplicate " + keyword + " declaration", line_no, static_cast<int>(p) + 1);
      }
      kind = k;
      bodies.push_back({std::string(rest), line_no, rest_column});
    } else {
      throw ParseError("unknown declaration '" + keyword + "'", line_no, static_cast<int>(p) + 1);
    }
    if (end == text.size()) break;
  }

  if (!base) throw ParseError("missing base declaration", 0, 0);
  if (!fibre) throw ParseError("missing fibre declaration", 0, 0);
  if (!kind) throw ParseError("missing model declaration (lagrangian, equation or hamiltonian)", 0, 0);

  std::optional<BundleSpec> spec;
  try {
    spec.emplace(*base, *fibre, params, 64);
  } catch (const JetError& e) {
    throw ParseError(e.what(), 0, 0);
  }
  if (*kind == ModelKind::hamiltonian) spec = spec->with_momenta();

  Model model{*kind, *spec, {}};
  for (const auto& body : bodies) {
    detail::ExpressionParser parser(body.text, body.line, body.column, [&](const std::string& id, int column) -> Expr {
      std::optional<Symbol> s;
      try {
        s = spec->resolve(id);
      } catch (const JetError& e) {
        throw ParseError(e.what(), body.line, column);
      }
      if (!s) throw ParseError("unknown identifier '" + id + "'", body.line, column);
      if (*kind == ModelKind::hamiltonian && s->order() > 0) {
        throw ParseError("Hamiltonian density may not contain jet coordinate '" + id + "'", body.line, column);
      }
      return Expr(*s);
    });
    model.payload.push_back(parser.parse());
  }

  int inferred = 0;
  for (const auto& e : model.payload) inferred = std::max(inferred, jet_order(e, *spec));
  switch (*kind) {
    case ModelKind::lagrangian: inferred *= 2; break;
    case ModelKind::hamiltonian: inferred = 1; break;
    case ModelKind::equation: break;
  }
  if (order) {
    int needed = 0;
    for (const auto& e : model.payload) needed = std::max(needed, jet_order(e, *spec));
    if (*order < needed) {
      throw ParseError("order override " + std::to_string(*order) + " is below the jet order " +
                           std::to_string(needed) + " used by the model",
                       0, 0);
    }
    inferred = *order;
  }
  model.spec = spec->with_order(inferred);
  return model;
}

}  // namespace jetvar
