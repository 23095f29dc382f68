#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jetvar/numeric/ode.hpp"

namespace jetvar {

/// Initial-value problem for a deviation pair on a one-dimensional base: the base
/// solution s and the Jacobi field ψ are integrated together.
struct JacobiProblem {
  EquationSystem system;
  Point base_initial;
  Point jacobi_initial;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
};

struct JacobiSolution {
  Trajectory base;
  Trajectory jacobi;
};

namespace detail {

inline void require_deviation_pair(const JacobiProblem& p) {
  if (p.system.structure != Structure::deviation_pair) throw Error("Jacobi problems need a deviation system");
  if (!(p.dt > 0.0)) throw Error("time step must be positive");
  if (!(p.t1 > p.t0)) throw Error("t1 must exceed t0");
}

/// The original block E^A = 0 of a deviation pair, on the underlying atlas of Y.
inline EquationSystem original_block(const EquationSystem& pair) {
  const auto half = static_cast<std::ptrdiff_t>(pair.block_size());
  return {{pair.equations.begin(), pair.equations.begin() + half}, pair.spec.projection(), Structure::plain};
}

/// Reads the values of `names` from `data`, which must cover exactly those names.
inline std::vector<double> initial_state(const std::vector<std::string>& names, const Point& data, const char* what) {
  std::vector<double> z;
  for (const auto& n : names) {
    auto it = data.find(n);
    if (it == data.end()) throw Error(std::string("missing ") + what + " initial value for '" + n + "'");
    z.push_back(it->second);
  }
  for (const auto& [k, v] : data) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw Error("'" + k + "' is not a " + what + " state variable");
    }
  }
  return z;
}

inline std::string base_name(const std::string& vertical_name, const BundleSpec& spec) {
  auto c = spec.jet_coordinate(vertical_name);
  if (!c || !c->vertical) throw Error("'" + vertical_name + "' is not a vertical coordinate");
  return spec.name(c->projection());
}

inline std::pair<std::vector<std::string>, std::vector<std::string>> split_state(const FirstOrderSystem& f,
                                                                                 const BundleSpec& spec) {
  std::vector<std::string> base;
  std::vector<std::string> jacobi;
  for (const auto& n : f.state) {
    auto c = spec.jet_coordinate(n);
    (c && c->vertical ? jacobi : base).push_back(n);
  }
  return {base, jacobi};
}

}  // namespace detail

/// Integrates the full deviation system and splits the result into s and ψ.
inline JacobiSolution solve_jacobi(const JacobiProblem& problem) {
  detail::require_deviation_pair(problem);
  const FirstOrderSystem f = compile(problem.system);
  const auto [base_names, jacobi_names] = detail::split_state(f, problem.system.spec);
  const auto zb = detail::initial_state(base_names, problem.base_initial, "base");
  const auto zj = detail::initial_state(jacobi_names, problem.jacobi_initial, "Jacobi");
  std::vector<double> z0;
  for (const auto& n : f.state) {
    auto b = std::find(base_names.begin(), base_names.end(), n);
    if (b != base_names.end()) {
      z0.push_back(zb[static_cast<std::size_t>(b - base_names.begin())]);
    } else {
      auto j = std::find(jacobi_names.begin(), jacobi_names.end(), n);
      z0.push_back(zj[static_cast<std::size_t>(j - jacobi_names.begin())]);
    }
  }
  const Trajectory joint = integrate(f, std::move(z0), problem.t0, problem.t1, problem.dt);

  JacobiSolution out;
  for (auto* part : {&out.base, &out.jacobi}) {
    part->times = joint.times;
    part->step = joint.step;
    part->method = joint.method;
    part->names = part == &out.base ? base_names : jacobi_names;
    std::vector<std::size_t> columns;
    for (const auto& n : part->names) columns.push_back(joint.column(n));
    part->states.reserve(joint.size());
    for (const auto& row : joint.states) {
      std::vector<double> v;
      v.reserve(columns.size());
      for (auto c : columns) v.push_back(row[c]);
      part->states.push_back(std::move(v));
    }
  }
  return out;
}

/// Independent oracle for ψ: integrates the original system from z0 and from
/// z0 + ε·ψ0 and returns (s_ε - s)/ε, labelled with the vertical state names.
inline Trajectory finite_difference_jacobi(const JacobiProblem& problem, double epsilon) {
  detail::require_deviation_pair(problem);
  if (!(epsilon > 0.0)) throw Error("finite-difference step must be positive");
  const BundleSpec& vspec = problem.system.spec;
  const FirstOrderSystem f = compile(detail::original_block(problem.system));
  const auto z0 = detail::initial_state(f.state, problem.base_initial, "base");

  Point shifted_data;
  for (const auto& [name, value] : problem.jacobi_initial) shifted_data[detail::base_name(name, vspec)] = value;
  const auto dz = detail::initial_state(f.state, shifted_data, "Jacobi");
  std::vector<double> z1 = z0;
  for (std::size_t i = 0; i < z1.size(); ++i) z1[i] += epsilon * dz[i];

  const Trajectory s = integrate(f, z0, problem.t0, problem.t1, problem.dt);
  const Trajectory se = integrate(f, z1, problem.t0, problem.t1, problem.dt);
  Trajectory out;
  out.times = s.times;
  out.step = s.step;
  out.method = "rk4-finite-difference";
  for (const auto& n : f.state) {
    auto c = vspec.jet_coordinate(n);
    out.names.push_back(vspec.name(c->partner()));
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::vector<double> row(f.dimension());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = (se.states[k][i] - s.states[k][i]) / epsilon;
    out.states.push_back(std::move(row));
  }
  return out;
}

/// Max over all components and grid points of |a - b| (columns matched by name).
inline double max_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw Error("trajectories are sampled on different grids");
  double worst = 0.0;
  for (std::size_t c = 0; c < a.names.size(); ++c) {
    const std::size_t cb = b.column(a.names[c]);
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.states[k][c] - b.states[k][cb]));
  }
  return worst;
}

struct ResidualRow {
  double epsilon = 0.0;
  double residual = 0.0;
};

struct ResidualTable {
  std::vector<ResidualRow> rows;
  /// Least-squares slope of log(residual) against log(ε) over rows with ε > 0.
  double exponent = std::numeric_limits<double>::quiet_NaN();
  std::string norm = "max |E^A| over components and interior grid points";
};

/// Least-squares slope of log(y) against log(x) over the pairs with x, y > 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

/// Residual of the original equations on s + εψ. Jets below the highest order come from
/// the state vector; the highest derivative is a fourth-order central difference of the
/// next-lower jet, so the two grid points at each end are excluded.
inline ResidualTable perturbation_residual(const JacobiProblem& problem, std::span<const double> epsilons) {
  const JacobiSolution solution = solve_jacobi(problem);
  const EquationSystem original = detail::original_block(problem.system);
  const std::vector<Expr> equations = detail::bind_parameters(original.equations, original.spec);
  const BundleSpec wide = original.spec.with_order(std::max(original.spec.order(), 8));
  const auto fields = detail::field_layout(equations, wide);
  const BundleSpec& vspec = problem.system.spec;

  // Slot layout: t, then every jet of every field up to and including its highest order.
  std::vector<std::string> slots{wide.base().front()};
  for (const auto& f : fields) {
    for (int k = 0; k <= f.order; ++k) slots.push_back(wide.name(detail::time_jet(f.root, k)));
  }
  std::vector<CompiledExpr> programs;
  for (const auto& e : equations) programs.emplace_back(normalize(e), slots);

  const auto& times = solution.base.times;
  const std::size_t count = times.size();
  if (count < 5) throw Error("residual evaluation needs at least five grid points");

  // Column of every jet below the highest order, in the base and Jacobi trajectories.
  struct Column {
    std::size_t base;
    std::size_t jacobi;
  };
  std::vector<std::vector<Column>> columns;
  for (const auto& f : fields) {
    std::vector<Column> cols;
    for (int k = 0; k < f.order; ++k) {
      const auto c = detail::time_jet(f.root, k);
      cols.push_back({solution.base.column(wide.name(c)), solution.jacobi.column(vspec.name(c.partner()))});
    }
    columns.push_back(std::move(cols));
  }

  ResidualTable table;
  std::vector<double> values(slots.size());
  for (double eps : epsilons) {
    auto state = [&](std::size_t k, const Column& c) {
      return solution.base.states[k][c.base] + eps * solution.jacobi.states[k][c.jacobi];
    };
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < count; ++k) {
      const double h = times[k + 1] - times[k];
      bool uniform = true;
      for (std::size_t j = k - 2; j < k + 2; ++j) {
        uniform = uniform && std::abs((times[j + 1] - times[j]) - h) <= 1e-9 * h;
      }
      if (!uniform) continue;
      values[0] = times[k];
      std::size_t slot = 1;
      for (std::size_t fi = 0; fi < fields.size(); ++fi) {
        const auto& cols = columns[fi];
        for (const auto& c : cols) values[slot++] = state(k, c);
        const Column& top = cols.back();
        values[slot++] = (-state(k + 2, top) + 8.0 * state(k + 1, top) - 8.0 * state(k - 1, top) + state(k - 2, top)) /
                         (12.0 * h);
      }
      for (const auto& p : programs) {
        const double r = std::abs(p(values));
        if (!std::isfinite(r)) throw NumericError("residual evaluation produced a non-finite value", times[k]);
        worst = std::max(worst, r);
      }
    }
    table.rows.push_back({eps, worst});
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : table.rows) {
    xs.push_back(r.epsilon);
    ys.push_back(r.residual);
  }
  table.exponent = loglog_slope(xs, ys);
  return table;
}

}  // namespace jetvar
