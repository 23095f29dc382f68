#pragma once

#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jetvar/core/print.hpp"
#include "jetvar/frontend/parser.hpp"

namespace jetvar {

enum class Format { text, latex, json };

namespace detail {

inline std::string latex_identifier(const std::string& name) {
  static const char* const greek[] = {"alpha", "beta",  "gamma", "delta", "epsilon", "zeta",    "eta",   "theta",
                                      "iota",  "kappa", "lambda", "mu",   "nu",      "xi",      "rho",   "sigma",
                                      "tau",   "upsilon", "phi",  "chi",  "psi",     "omega",   "Gamma", "Delta",
                                      "Theta", "Lambda", "Xi",    "Pi",   "Sigma",   "Upsilon", "Phi",   "Psi",
                                      "Omega"};
  for (const char* g : greek) {
    if (name == g) return std::string("\\") + g;
  }
  if (name.size() == 1) return name;
  return "\\mathrm{" + name + "}";
}

/// LaTeX for coordinate names: y_tt -> y_{tt}, v_y_tt -> \dot{y}_{tt}, pt_y -> p^{t}_{y},
/// vpt_y_t -> \dot{p}^{t}_{y,t}. The dot marks the vertical (variation) direction; time
/// derivatives stay in the subscript.
inline std::string latex_symbol(const std::string& name, const BundleSpec* spec) {
  if (spec != nullptr) {
    if (auto c = spec->jet_coordinate(name)) {
      const std::string field = latex_identifier(spec->fibre().at(c->field));
      std::string sub;
      for (auto d : c->index.entries()) sub += spec->base().at(d);
      if (c->momentum) {
        std::string p = c->vertical ? "\\dot{p}" : "p";
        std::string lower = field + (sub.empty() ? "" : "," + sub);
        return p + "^{" + spec->base().at(*c->momentum) + "}_{" + lower + "}";
      }
      std::string root = c->vertical ? "\\dot{" + field + "}" : field;
      return sub.empty() ? root : root + "_{" + sub + "}";
    }
  }
  return latex_identifier(name);
}

class LatexPrinter {
 public:
  explicit LatexPrinter(const BundleSpec* spec) : spec_(spec) {}

  std::string print(const Expr& e, int parent = 0) const {
    int own = 0;
    std::string s = print_raw(e, own);
    if (own < parent) return "\\left(" + s + "\\right)";
    return s;
  }

 private:
  static std::string rational(const Rational& q) {
    if (is_integer(q)) return to_string(q);
    std::string sign = q < 0 ? "-" : "";
    return sign + "\\frac{" + Integer(abs(numerator(q))).str() + "}{" + denominator(q).str() + "}";
  }

  std::string print_raw(const Expr& e, int& prec) const {
    switch (e.op()) {
      case Op::constant:
        prec = e.value() < 0 ? prec_neg : prec_atom;
        return rational(e.value());
      case Op::symbol:
        prec = prec_atom;
        return latex_symbol(e.sym().name(), spec_);
      case Op::pi:
        prec = prec_atom;
        return "\\pi";
      case Op::func: {
        prec = prec_atom;
        const std::string name = e.fn() == Fn::ln ? "\\ln" : "\\" + std::string(to_string(e.fn()));
        if (e.fn() == Fn::sqrt) return "\\sqrt{" + print(e.argument()) + "}";
        return name + "\\left(" + print(e.argument()) + "\\right)";
      }
      case Op::add: {
        prec = prec_add;
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
      case Op::pow:
        if (e.exponent() < 0) return product({e}, prec);
        return power(e, prec);
      case Op::mul:
        return product(e.args(), prec);
    }
    return {};
  }

  std::string power(const Expr& e, int& prec) const {
    const Rational& q = e.exponent();
    if (q == Rational(1, 2)) {
      prec = prec_atom;
      return "\\sqrt{" + print(e.base()) + "}";
    }
    prec = prec_pow;
    const std::string exponent = to_string(q);
    return "{" + print(e.base(), prec_atom) + "}^{" + exponent + "}";
  }

  std::string product(const std::vector<Expr>& factors, int& prec) const {
    std::vector<std::string> num;
    std::vector<std::string> den;
    bool negative = false;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const Expr& f = factors[i];
      if (f.is_constant()) {
        Rational q = f.value();
        if (i == 0 && q < 0) {
          negative = true;
          q = -q;
        }
        if (q != 1) {
          if (numerator(q) != 1) num.push_back(numerator(q).str());
          if (denominator(q) != 1) den.push_back(denominator(q).str());
        }
        continue;
      }
      if (f.op() == Op::pow && f.exponent() < 0) {
        Expr inverse = -f.exponent() == 1 ? f.base() : Expr::pow(f.base(), -f.exponent());
        den.push_back(print(inverse, prec_mul));
        continue;
      }
      num.push_back(print(f, prec_mul));
    }
    auto join = [](const std::vector<std::string>& parts) {
      std::string s;
      for (std::size_t i = 0; i < parts.size(); ++i) s += (i == 0 ? "" : " ") + parts[i];
      return s.empty() ? std::string("1") : s;
    };
    std::string out = den.empty() ? join(num) : "\\frac{" + join(num) + "}{" + join(den) + "}";
    prec = prec_mul;
    if (negative) {
      prec = prec_neg;
      out = "-" + out;
    }
    return out;
  }

  const BundleSpec* spec_;
};

inline std::string format_witness(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json json_integer(const Integer& n) {
  if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max()) {
    return n.convert_to<std::int64_t>();
  }
  return n.str();
}

inline nlohmann::json json_rational(const Rational& q) {
  if (is_integer(q)) return json_integer(numerator(q));
  return nlohmann::json::array({"/", json_integer(numerator(q)), json_integer(denominator(q))});
}

}  // namespace detail

inline std::string to_latex(const Expr& e, const BundleSpec* spec = nullptr) {
  return detail::LatexPrinter(spec).print(e);
}

/// Prefix-form nested arrays, e.g. ["+", ["*", 2, "y"], ["^", "y_t", 2]].
inline nlohmann::json to_json(const Expr& e) {
  using nlohmann::json;
  switch (e.op()) {
    case Op::constant: return detail::json_rational(e.value());
    case Op::symbol: return e.sym().name();
    case Op::pi: return "pi";
    case Op::func: return json::array({std::string(to_string(e.fn())), to_json(e.argument())});
    case Op::pow: return json::array({"^", to_json(e.base()), detail::json_rational(e.exponent())});
    case Op::add:
    case Op::mul: {
      json out = json::array({e.op() == Op::add ? "+" : "*"});
      for (const auto& a : e.args()) out.push_back(to_json(a));
      return out;
    }
  }
  return nullptr;
}

inline nlohmann::json to_json(const BundleSpec& spec) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : spec.params()) {
    params.push_back({{"name", p.name}, {"value", p.value ? nlohmann::json(to_string(*p.value)) : nlohmann::json()}});
  }
  return {{"base", spec.base()},   {"fibre", spec.fibre()},       {"params", params},
          {"order", spec.order()}, {"vertical", spec.vertical()}, {"momenta", spec.has_momenta()}};
}

inline std::string render(const Expr& e, Format format, const BundleSpec* spec = nullptr) {
  switch (format) {
    case Format::text: return to_string(e);
    case Format::latex: return to_latex(e, spec);
    case Format::json: return to_json(e).dump();
  }
  return {};
}

/// One equation per line (`... = 0`), one display per equation, or a JSON document.
inline std::string render(const EquationSystem& system, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::text:
      for (const auto& e : system.equations) out << to_string(e) << " = 0\n";
      break;
    case Format::latex:
      for (const auto& e : system.equations) out << "\\[ " << to_latex(e, &system.spec) << " = 0 \\]\n";
      break;
    case Format::json: {
      nlohmann::json eqs = nlohmann::json::array();
      for (const auto& e : system.equations) eqs.push_back(to_json(e));
      nlohmann::json doc = {{"equations", eqs},
                            {"spec", to_json(system.spec)},
                            {"structure", system.structure == Structure::deviation_pair ? "deviation-pair" : "plain"}};
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

/// The model in its own file syntax; parse_model(render_model(m)) reproduces m.
inline std::string render_model(const Model& model) {
  std::ostringstream out;
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += " " + x;
    return s;
  };
  out << "base" << join(model.spec.base()) << '\n';
  out << "fibre" << join(model.spec.fibre()) << '\n';
  for (const auto& p : model.spec.params()) {
    out << "param " << p.name;
    if (p.value) out << " = " << to_string(*p.value);
    out << '\n';
  }
  for (const auto& e : model.payload) out << to_string(model.kind) << ' ' << to_string(e) << '\n';
  return out.str();
}

inline std::string render(const CommutationReport& report, Format format) {
  std::ostringstream out;
  if (format == Format::json) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : report.pairs) {
      nlohmann::json item = {{"label", p.label},
                             {"lhs", to_json(p.lhs)},
                             {"rhs", to_json(p.rhs)},
                             {"verdict", std::string(to_string(p.result.verdict))},
                             {"method", p.result.symbolic ? "symbolic" : "numeric"}};
      if (p.result.witness) item["witness"] = *p.result.witness;
      pairs.push_back(std::move(item));
    }
    nlohmann::json doc = {{"theorem", report.theorem}, {"passed", report.passed()}, {"pairs", pairs}};
    out << doc.dump(2) << '\n';
    return out.str();
  }
  out << report.theorem << ": " << (report.passed() ? "PASS" : "FAIL") << " (" << report.pairs.size()
      << (report.pairs.size() == 1 ? " pair)" : " pairs)") << '\n';
  for (const auto& p : report.pairs) {
    const bool ok = p.result.verdict == Verdict::equal;
    out << "  [" << (ok ? "pass" : to_string(p.result.verdict)) << "] " << p.label;
    if (ok) {
      out << (p.result.symbolic ? "  (symbolic)" : "  (numeric, " + std::to_string(p.result.points_checked) + " points)");
    }
    out << '\n';
    if (!ok) {
      out << "      lhs: " << render(p.lhs, format) << '\n';
      out << "      rhs: " << render(p.rhs, format) << '\n';
      if (p.result.witness) {
        out << "      witness:";
        for (const auto& [k, v] : *p.result.witness) out << ' ' << k << '=' << detail::format_witness(v);
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace jetvar
