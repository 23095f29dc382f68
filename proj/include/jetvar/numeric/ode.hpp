#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "jetvar/core/evaluate.hpp"
#include "jetvar/variational/variational.hpp"

namespace jetvar {

class SingularSystemError : public CompileError {
 public:
  using CompileError::CompileError;
};

/// A field of a compiled system and where its jets live in the state vector.
struct FieldLayout {
  JetCoordinate root;
  int order = 0;           // highest derivative appearing in the equations
  std::size_t offset = 0;  // state index of the undifferentiated field
};

/// dZ/dt = F(t, Z) with Z the stacked jets (y, y_t, ..., then v, v_t, ...).
struct FirstOrderSystem {
  std::string time;
  std::vector<std::string> state;
  std::vector<Expr> rhs;
  std::vector<FieldLayout> fields;
  std::vector<CompiledExpr> programs;

  std::size_t dimension() const { return state.size(); }

  void evaluate(double t, std::span<const double> z, std::span<double> dz, std::vector<double>& scratch) const {
    scratch.resize(z.size() + 1);
    scratch[0] = t;
    std::copy(z.begin(), z.end(), scratch.begin() + 1);
    for (std::size_t i = 0; i < programs.size(); ++i) dz[i] = programs[i](scratch);
  }
};

namespace detail {

inline bool field_before(const JetCoordinate& a, const JetCoordinate& b) {
  auto key = [](const JetCoordinate& c) {
    return std::tuple(c.vertical, c.momentum.has_value(), c.field, c.momentum.value_or(0));
  };
  return key(a) < key(b);
}

/// Substitutes numeric parameter values; an unbound parameter that is still referenced
/// is a compile error.
inline std::vector<Expr> bind_parameters(const std::vector<Expr>& equations, const BundleSpec& spec) {
  std::map<std::string, Expr> bindings;
  for (const auto& p : spec.params()) {
    if (p.value) bindings.emplace(p.name, Expr(*p.value));
  }
  std::vector<Expr> out;
  for (const auto& e : equations) {
    for (const auto& s : free_symbols(e)) {
      const Parameter* p = spec.parameter(s.name());
      if (p && !p->value) throw CompileError("parameter '" + p->name + "' has no numeric value");
    }
    out.push_back(detail::substitute_raw(e, bindings));
  }
  return out;
}

/// Fields present in the equations and their highest derivative, read from the raw
/// (unnormalized) expressions so that a vanishing leading coefficient stays visible.
inline std::vector<FieldLayout> field_layout(const std::vector<Expr>& equations, const BundleSpec& spec) {
  std::vector<FieldLayout> fields;
  for (const auto& e : equations) {
    for (const auto& s : free_symbols(e)) {
      if (spec.base_index(s.name()) || spec.parameter(s.name())) continue;
      auto c = spec.jet_coordinate(s.name());
      if (!c) throw UnknownSymbolError(s.name());
      const int r = static_cast<int>(c->index.size());
      auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldLayout& f) { return f.root == c->root(); });
      if (it == fields.end()) {
        fields.push_back({c->root(), r, 0});
      } else {
        it->order = std::max(it->order, r);
      }
    }
  }
  std::sort(fields.begin(), fields.end(), [](const FieldLayout& a, const FieldLayout& b) {
    return field_before(a.root, b.root);
  });
  std::size_t offset = 0;
  for (auto& f : fields) {
    f.offset = offset;
    offset += static_cast<std::size_t>(f.order);
  }
  return fields;
}

inline JetCoordinate time_jet(const JetCoordinate& root, int k) {
  JetCoordinate c = root;
  c.index = MultiIndex(std::vector<std::size_t>(static_cast<std::size_t>(k), 0));
  return c;
}

}  // namespace detail

/// Brings an equation system on a one-dimensional base into explicit first-order form.
/// Each equation must be affine in the highest derivatives; the linear system for them is
/// solved symbolically by Gauss–Jordan elimination.
inline FirstOrderSystem compile(const EquationSystem& system) {
  const BundleSpec& spec = system.spec;
  if (spec.dimension() != 1) throw CompileError("numeric integration requires a one-dimensional base");
  const BundleSpec wide = spec.with_order(std::max(spec.order(), 8));
  const std::vector<Expr> equations = detail::bind_parameters(system.equations, spec);
  std::vector<FieldLayout> fields = detail::field_layout(equations, wide);

  if (fields.size() != equations.size()) {
    throw CompileError("not in solvable normal form: " + std::to_string(equations.size()) + " equations for " +
                       std::to_string(fields.size()) + " fields");
  }
  for (const auto& f : fields) {
    if (f.order == 0) throw CompileError("not in solvable normal form: field '" + wide.name(f.root) + "' is never differentiated");
    if (f.order > 4) throw CompileError("not in solvable normal form: order of '" + wide.name(f.root) + "' exceeds 4");
  }

  const std::size_t n = fields.size();
  std::vector<std::string> unknowns;
  for (const auto& f : fields) unknowns.push_back(wide.name(detail::time_jet(f.root, f.order)));
  std::map<std::string, Expr> zero;
  for (const auto& u : unknowns) zero.emplace(u, Expr(0L));

  std::vector<std::vector<Expr>> matrix(n, std::vector<Expr>(n));
  std::vector<Expr> rhs(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j = 0; j < n; ++j) {
      matrix[a][j] = diff(equations[a], unknowns[j]);
      for (const auto& u : unknowns) {
        if (contains_symbol(matrix[a][j], u)) {
          throw CompileError("not in solvable normal form: equation " + std::to_string(a + 1) + " is not affine in '" +
                             unknowns[j] + "'");
        }
      }
    }
    rhs[a] = normalize(-substitute(equations[a], zero));
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r) {
      if (matrix[r][col].is_zero()) continue;
      if (pivot == n) {
        pivot = r;
        continue;
      }
      const bool better_const = matrix[r][col].is_constant() && !matrix[pivot][col].is_constant();
      const bool same_kind = matrix[r][col].is_constant() == matrix[pivot][col].is_constant();
      if (better_const || (same_kind && term_count(matrix[r][col]) < term_count(matrix[pivot][col]))) pivot = r;
    }
    if (pivot == n) throw SingularSystemError("singular equation: coefficient of '" + unknowns[col] + "' vanishes");
    std::swap(matrix[pivot], matrix[col]);
    std::swap(rhs[pivot], rhs[col]);
    const Expr inverse = normalize(Expr::pow(matrix[col][col], -1));
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || matrix[r][col].is_zero()) continue;
      const Expr factor = normalize(matrix[r][col] * inverse);
      for (std::size_t c = col + 1; c < n; ++c) {
        if (!matrix[col][c].is_zero()) matrix[r][c] = normalize(matrix[r][c] - factor * matrix[col][c]);
      }
      rhs[r] = normalize(rhs[r] - factor * rhs[col]);
      matrix[r][col] = Expr(0L);
    }
  }

  FirstOrderSystem out;
  out.time = spec.base().front();
  out.fields = fields;
  std::vector<Expr> solution(n);
  for (std::size_t col = 0; col < n; ++col) solution[col] = normalize(rhs[col] * Expr::pow(matrix[col][col], -1));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = fields[i];
    for (int k = 0; k < f.order; ++k) {
      out.state.push_back(wide.name(detail::time_jet(f.root, k)));
      out.rhs.push_back(k + 1 < f.order ? Expr(wide.symbol(detail::time_jet(f.root, k + 1))) : solution[i]);
    }
  }
  std::vector<std::string> slots{out.time};
  slots.insert(slots.end(), out.state.begin(), out.state.end());
  for (const auto& e : out.rhs) {
    for (const auto& s : free_symbols(e)) {
      if (std::find(slots.begin(), slots.end(), s.name()) == slots.end()) {
        throw CompileError("not in solvable normal form: '" + s.name() + "' is not a state variable");
      }
    }
    out.programs.emplace_back(e, slots);
  }
  return out;
}

/// Uniformly sampled solution. `states[k]` is the state at `times[k]`.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::string> names;
  double step = 0.0;
  std::string method = "rk4";

  std::size_t size() const { return times.size(); }

  std::size_t column(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error("trajectory has no column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  double value(std::size_t k, const std::string& name) const { return states[k][column(name)]; }
};

/// Time grid t0, t0+dt, ... with a final partial step landing exactly on t1.
inline std::vector<double> time_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  if (!(t1 > t0)) throw Error("t1 must exceed t0");
  const double steps = (t1 - t0) / dt;
  const auto full = static_cast<std::size_t>(std::floor(steps + 1e-9));
  std::vector<double> grid;
  grid.reserve(full + 2);
  for (std::size_t k = 0; k <= full; ++k) grid.push_back(t0 + static_cast<double>(k) * dt);
  if (t1 - grid.back() > 1e-9 * dt) {
    grid.push_back(t1);
  } else {
    grid.back() = t1;
  }
  return grid;
}

/// Classical fixed-step fourth-order Runge–Kutta. Deterministic for fixed inputs; aborts
/// with NumericError on the first non-finite state.
inline Trajectory integrate(const FirstOrderSystem& f, std::vector<double> z0, double t0, double t1, double dt) {
  if (z0.size() != f.dimension()) {
    throw Error("initial state has " + std::to_string(z0.size()) + " entries, system has " +
                std::to_string(f.dimension()));
  }
  Trajectory out;
  out.times = time_grid(t0, t1, dt);
  out.names = f.state;
  out.step = dt;
  out.states.reserve(out.times.size());
  out.states.push_back(std::move(z0));

  const std::size_t d = f.dimension();
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d), scratch;
  for (std::size_t s = 1; s < out.times.size(); ++s) {
    const double t = out.times[s - 1];
    const double h = out.times[s] - t;
    const auto& z = out.states.back();
    f.evaluate(t, z, k1, scratch);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
    f.evaluate(t + 0.5 * h, tmp, k2, scratch);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
    f.evaluate(t + 0.5 * h, tmp, k3, scratch);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = z[i] + h * k3[i];
    f.evaluate(t + h, tmp, k4, scratch);
    std::vector<double> next(d);
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i])) {
        throw NumericError("integration produced a non-finite value for '" + f.state[i] + "' after t = " +
                               std::to_string(t),
                           t);
      }
    }
    out.states.push_back(std::move(next));
  }
  return out;
}

inline std::string format_number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

/// CSV with header `t,<names...>` and one row per grid point, 17 significant digits.
inline void write_csv(std::ostream& out, const std::vector<const Trajectory*>& parts) {
  out << "t";
  for (const auto* p : parts) {
    for (const auto& n : p->names) out << ',' << n;
  }
  out << '\n';
  const std::size_t rows = parts.empty() ? 0 : parts.front()->size();
  for (std::size_t k = 0; k < rows; ++k) {
    out << format_number(parts.front()->times[k]);
    for (const auto* p : parts) {
      for (double v : p->states[k]) out << ',' << format_number(v);
    }
    out << '\n';
  }
}

inline void write_csv(std::ostream& out, const Trajectory& t) { write_csv(out, std::vector<const Trajectory*>{&t}); }

}  // namespace jetvar
