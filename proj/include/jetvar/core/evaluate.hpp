#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "jetvar/core/error.hpp"
#include "jetvar/core/print.hpp"

namespace jetvar {

using Point = std::map<std::string, double>;

namespace detail {

inline double real_power(double base, const Rational& q, const Expr& where) {
  if (is_integer(q)) {
    const long k = numerator(q).convert_to<long>();
    if (base == 0.0 && k < 0) throw DomainError("division by zero", to_string(where));
    return std::pow(base, static_cast<double>(k));
  }
  if (base < 0.0) throw DomainError("fractional power of a negative number", to_string(where));
  if (base == 0.0 && q < 0) throw DomainError("division by zero", to_string(where));
  return std::pow(base, to_double(q));
}

inline double eval_node(const Expr& e, const Point& point) {
  switch (e.op()) {
    case Op::constant:
      return to_double(e.value());
    case Op::pi:
      return std::numbers::pi;
    case Op::symbol: {
      auto it = point.find(e.sym().name());
      if (it == point.end()) throw EvaluationError("unbound symbol '" + e.sym().name() + "'");
      return it->second;
    }
    case Op::add: {
      double s = 0.0;
      for (const auto& t : e.args()) s += eval_node(t, point);
      return s;
    }
    case Op::mul: {
      double p = 1.0;
      for (const auto& f : e.args()) p *= eval_node(f, point);
      return p;
    }
    case Op::pow:
      return real_power(eval_node(e.base(), point), e.exponent(), e);
    case Op::func: {
      const double a = eval_node(e.argument(), point);
      switch (e.fn()) {
        case Fn::sin: return std::sin(a);
        case Fn::cos: return std::cos(a);
        case Fn::tan: return std::tan(a);
        case Fn::exp: return std::exp(a);
        case Fn::ln:
          if (a <= 0.0) throw DomainError("logarithm of a non-positive number", to_string(e));
          return std::log(a);
        case Fn::sqrt:
          if (a < 0.0) throw DomainError("square root of a negative number", to_string(e));
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

}  // namespace detail

/// Double-precision evaluation. Throws EvaluationError for unbound symbols and
/// DomainError (naming the offending subexpression) outside a function's domain.
inline double eval(const Expr& e, const Point& point) { return detail::eval_node(e, point); }

/// Stack-machine form of an expression over a fixed slot layout, for inner loops.
/// Domain violations propagate as NaN or infinity instead of throwing.
class CompiledExpr {
 public:
  CompiledExpr() = default;

  /// Throws EvaluationError if `e` references a symbol that is not in `slots`.
  CompiledExpr(const Expr& e, std::span<const std::string> slots) {
    emit(e, slots);
    int depth = 0;
    for (const auto& in : code_) {
      depth += in.stack_delta();
      max_depth_ = std::max(max_depth_, depth);
    }
  }

  double operator()(std::span<const double> values) const {
    if (max_depth_ <= kInlineStack) {
      std::array<double, kInlineStack> stack;
      return run(values, stack.data());
    }
    std::vector<double> stack(static_cast<std::size_t>(max_depth_));
    return run(values, stack.data());
  }

 private:
  enum class Code { constant, load, add, mul, pow_int, pow_real, func };
  struct Instruction {
    Code code;
    int count = 0;
    double value = 0.0;
    Fn fn = Fn::sin;
    int stack_delta() const {
      switch (code) {
        case Code::constant:
        case Code::load: return 1;
        case Code::add:
        case Code::mul: return 1 - count;
        default: return 0;
      }
    }
  };
  static constexpr int kInlineStack = 64;

  void emit(const Expr& e, std::span<const std::string> slots) {
    switch (e.op()) {
      case Op::constant:
        code_.push_back({Code::constant, 0, to_double(e.value())});
        return;
      case Op::pi:
        code_.push_back({Code::constant, 0, std::numbers::pi});
        return;
      case Op::symbol: {
        for (std::size_t i = 0; i < slots.size(); ++i) {
          if (slots[i] == e.sym().name()) {
            code_.push_back({Code::load, static_cast<int>(i)});
            return;
          }
        }
        throw EvaluationError("unbound symbol '" + e.sym().name() + "'");
      }
      case Op::add:
      case Op::mul:
        for (const auto& a : e.args()) emit(a, slots);
        code_.push_back({e.op() == Op::add ? Code::add : Code::mul, static_cast<int>(e.args().size())});
        return;
      case Op::pow:
        emit(e.base(), slots);
        if (is_integer(e.exponent())) {
          code_.push_back({Code::pow_int, numerator(e.exponent()).convert_to<int>()});
        } else {
          code_.push_back({Code::pow_real, 0, to_double(e.exponent())});
        }
        return;
      case Op::func:
        emit(e.argument(), slots);
        code_.push_back({Code::func, 0, 0.0, e.fn()});
        return;
    }
  }

  double run(std::span<const double> values, double* stack) const {
    int top = 0;
    for (const auto& in : code_) {
      switch (in.code) {
        case Code::constant: stack[top++] = in.value; break;
        case Code::load: stack[top++] = values[static_cast<std::size_t>(in.count)]; break;
        case Code::add: {
          double s = 0.0;
          for (int i = top - in.count; i < top; ++i) s += stack[i];
          top -= in.count;
          stack[top++] = s;
          break;
        }
        case Code::mul: {
          double p = 1.0;
          for (int i = top - in.count; i < top; ++i) p *= stack[i];
          top -= in.count;
          stack[top++] = p;
          break;
        }
        case Code::pow_int: {
          double& x = stack[top - 1];
          if (in.count == 2) {
            x = x * x;
          } else {
            x = std::pow(x, static_cast<double>(in.count));
          }
          break;
        }
        case Code::pow_real: {
          double& x = stack[top - 1];
          x = x < 0.0 ? std::nan("") : std::pow(x, in.value);
          break;
        }
        case Code::func: {
          double& x = stack[top - 1];
          switch (in.fn) {
            case Fn::sin: x = std::sin(x); break;
            case Fn::cos: x = std::cos(x); break;
            case Fn::tan: x = std::tan(x); break;
            case Fn::exp: x = std::exp(x); break;
            case Fn::ln: x = x <= 0.0 ? std::nan("") : std::log(x); break;
            case Fn::sqrt: x = std::sqrt(x); break;
          }
          break;
        }
      }
    }
    return top == 1 ? stack[0] : 0.0;
  }

  std::vector<Instruction> code_;
  int max_depth_ = 0;
};

}  // namespace jetvar
