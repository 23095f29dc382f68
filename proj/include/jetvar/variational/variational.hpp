#pragma once

#include <string>
#include <vector>

#include "jetvar/core/equivalence.hpp"
#include "jetvar/core/print.hpp"
#include "jetvar/jet/derivatives.hpp"

namespace jetvar {

/// An r-order differential operator Δ: J^rY → E, kept as its components E^A.
struct DifferentialOperator {
  std::vector<Expr> components;
  int order = 0;
  BundleSpec spec;
  /// True when the operator already lives on VY (a vertical extension).
  bool vertical = false;
};

enum class Structure { plain, deviation_pair };

/// Equations E^A = 0. A deviation pair holds the original block followed by its d_V block.
struct EquationSystem {
  std::vector<Expr> equations;
  BundleSpec spec;
  Structure structure = Structure::plain;

  std::size_t block_size() const {
    return structure == Structure::deviation_pair ? equations.size() / 2 : equations.size();
  }
};

/// A density 𝓛 d^nx on J^kY.
struct Lagrangian {
  Expr density;
  int order = 0;
  BundleSpec spec;
};

inline DifferentialOperator make_operator(std::vector<Expr> components, const BundleSpec& spec) {
  DifferentialOperator op{std::move(components), 0, spec, spec.vertical()};
  for (const auto& c : op.components) {
    for (const auto& s : free_symbols(c)) spec.require(s.name());
    op.order = std::max(op.order, jet_order(c, spec));
  }
  return op;
}

inline DifferentialOperator as_operator(const EquationSystem& system) {
  return make_operator(system.equations, system.spec);
}

inline Lagrangian make_lagrangian(Expr density, const BundleSpec& spec) {
  for (const auto& s : free_symbols(density)) spec.require(s.name());
  const int k = jet_order(density, spec);
  return {std::move(density), k, spec};
}

/// V𝓛 = d_V 𝓛 on the doubled atlas; the jet order is unchanged.
inline Lagrangian vertical_extension_density(const Lagrangian& L) {
  if (L.spec.vertical() || has_vertical_symbols(L.density, L.spec)) {
    throw JetError("vertical derivative applied twice");
  }
  return {vertical_derivative(L.density, L.spec), L.order, L.spec.vertical_extension()};
}

/// {E^A = 0} ∪ {d_V E^A = 0}; the first block is the input verbatim.
inline EquationSystem deviation_system(const DifferentialOperator& op) {
  if (op.vertical || op.spec.vertical()) throw JetError("vertical derivative applied twice");
  EquationSystem out{op.components, op.spec.vertical_extension(), Structure::deviation_pair};
  for (const auto& c : op.components) out.equations.push_back(vertical_derivative(c, op.spec));
  return out;
}

/// δ𝓛 component i: ∂_i 𝓛 + Σ_{0<|Λ|≤k} (-1)^|Λ| d_Λ ∂^Λ_i 𝓛, one per fibre coordinate of
/// the atlas (vertical ones included on VY). Operator order is 2k.
inline DifferentialOperator euler_lagrange(const Lagrangian& L) {
  const Expr density = normalize(L.density);
  const auto indices = multi_indices(L.spec.dimension(), static_cast<std::size_t>(L.order));
  const auto present = free_symbols(density);
  DifferentialOperator op{{}, 2 * L.order, L.spec, L.spec.vertical()};
  for (const auto& field : L.spec.fields()) {
    std::vector<Expr> terms{diff(density, L.spec.name(field))};
    for (const auto& index : indices) {
      JetCoordinate c = field;
      c.index = index;
      const std::string name = L.spec.name(c);
      if (!present.contains(Symbol(name, SymbolKind::jet))) continue;
      Expr inner = iterated_total_derivative(diff(density, name), index, L.spec);
      terms.push_back(index.size() % 2 == 0 ? inner : -inner);
    }
    op.components.push_back(normalize(Expr::add(std::move(terms))));
  }
  return op;
}

/// One asserted identity of a commutation theorem.
struct PairCheck {
  std::string label;
  Expr lhs;
  Expr rhs;
  EquivalenceResult result;
};

struct CommutationReport {
  std::string theorem;
  std::vector<PairCheck> pairs;

  bool passed() const {
    return !pairs.empty() && std::all_of(pairs.begin(), pairs.end(), [](const PairCheck& p) {
      return p.result.verdict == Verdict::equal;
    });
  }
};

/// δ(VL) = V(δL): compares the Euler–Lagrange operator of the vertical extension with the
/// deviation of the Euler–Lagrange operator. On the doubled fibre (y^i, v^i) the
/// v^i-variation of VL pairs with (δL)_i and the y^i-variation with d_V (δL)_i.
inline CommutationReport check_el_vertical_commute(const Lagrangian& L, const EquivalenceOptions& options = {}) {
  const DifferentialOperator lhs = euler_lagrange(vertical_extension_density(L));
  const EquationSystem rhs = deviation_system(euler_lagrange(L));
  const std::size_t m = L.spec.fibre().size();
  CommutationReport report{"δ(VL) = V(δL)", {}};
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& y = L.spec.fibre()[i];
    report.pairs.push_back({"δ_v_" + y + "(VL) = (δL)_" + y, lhs.components[m + i], rhs.equations[i],
                            equivalent(lhs.components[m + i], rhs.equations[i], options)});
    report.pairs.push_back({"δ_" + y + "(VL) = d_V (δL)_" + y, lhs.components[i], rhs.equations[m + i],
                            equivalent(lhs.components[i], rhs.equations[m + i], options)});
  }
  return report;
}

/// d_V ∘ d_λ = d_λ ∘ d_V on every component of an operator (the identification VJ^rY = J^r(VY)).
inline CommutationReport check_prolongation_commute(const DifferentialOperator& op,
                                                    const EquivalenceOptions& options = {}) {
  const BundleSpec spec = op.spec.with_order(std::max(op.spec.order(), op.order + 1));
  const BundleSpec vspec = spec.vertical_extension();
  CommutationReport report{"V(d_λ E) = d_λ(V E)", {}};
  for (std::size_t a = 0; a < op.components.size(); ++a) {
    for (std::size_t d = 0; d < spec.dimension(); ++d) {
      Expr lhs = vertical_derivative(total_derivative(op.components[a], d, spec), spec);
      Expr rhs = total_derivative(vertical_derivative(op.components[a], spec), d, vspec);
      report.pairs.push_back({"E" + std::to_string(a + 1) + ", d_" + spec.base()[d], lhs, rhs,
                              equivalent(lhs, rhs, options)});
    }
  }
  return report;
}

}  // namespace jetvar
