#pragma once

#include <string>
#include <vector>

#include "jetvar/variational/variational.hpp"

namespace jetvar {

/// A fibre coordinate with its conjugate polymomenta, one per base direction.
struct ConjugatePair {
  Symbol coordinate;
  std::vector<Symbol> momenta;
};

/// Hamiltonian density 𝓗(x^λ, y^i, p^λ_i) on the Legendre bundle, single chart.
struct HamiltonianSystem {
  Expr density;
  BundleSpec spec;
  std::vector<ConjugatePair> pairs;
  bool vertical = false;
};

/// Builds the system on `spec` with pairs (y^i, p^λ_i). The density may not contain jets
/// of order >= 1 or vertical coordinates.
inline HamiltonianSystem make_hamiltonian(Expr density, const BundleSpec& spec) {
  const BundleSpec s = spec.with_momenta().with_order(std::max(spec.order(), 1));
  for (const auto& sym : free_symbols(density)) {
    s.require(sym.name());
    auto c = s.jet_coordinate(sym.name());
    if (c && !c->index.empty()) {
      throw JetError("Hamiltonian density may not contain jet coordinate '" + sym.name() + "'");
    }
    if (c && c->vertical) throw JetError("vertical derivative applied twice");
  }
  HamiltonianSystem H{std::move(density), s, {}, false};
  for (std::size_t i = 0; i < s.fibre().size(); ++i) {
    ConjugatePair pair{s.symbol({i, {}, false, std::nullopt}), {}};
    for (std::size_t d = 0; d < s.dimension(); ++d) pair.momenta.push_back(s.symbol({i, {}, false, d}));
    H.pairs.push_back(std::move(pair));
  }
  return H;
}

/// Covariant Hamilton equations: q_λ - ∂𝓗/∂P^λ = 0 for every pair and direction, then
/// Σ_λ d_λ P^λ + ∂𝓗/∂q = 0 for every pair.
inline EquationSystem hamilton_equations(const HamiltonianSystem& H) {
  EquationSystem out{{}, H.spec, Structure::plain};
  const Expr density = normalize(H.density);
  for (const auto& pair : H.pairs) {
    for (std::size_t d = 0; d < H.spec.dimension(); ++d) {
      Expr velocity = total_derivative(Expr(pair.coordinate), d, H.spec);
      out.equations.push_back(normalize(velocity - diff(density, pair.momenta[d])));
    }
  }
  for (const auto& pair : H.pairs) {
    std::vector<Expr> terms;
    for (std::size_t d = 0; d < H.spec.dimension(); ++d) {
      terms.push_back(total_derivative(Expr(pair.momenta[d]), d, H.spec));
    }
    terms.push_back(diff(density, pair.coordinate));
    out.equations.push_back(normalize(Expr::add(std::move(terms))));
  }
  return out;
}

/// VH with density d_V 𝓗 on the Legendre bundle over VY. The conjugate of y^i is the
/// vertical momentum vp^λ_i and the conjugate of v^i is p^λ_i.
inline HamiltonianSystem vertical_hamiltonian(const HamiltonianSystem& H) {
  if (H.vertical || H.spec.vertical()) throw JetError("vertical derivative applied twice");
  const BundleSpec vs = H.spec.vertical_extension();
  HamiltonianSystem out{vertical_derivative(H.density, H.spec), vs, {}, true};
  const std::size_t m = vs.fibre().size();
  for (int vertical = 0; vertical < 2; ++vertical) {
    for (std::size_t i = 0; i < m; ++i) {
      ConjugatePair pair{vs.symbol({i, {}, vertical == 1, std::nullopt}), {}};
      for (std::size_t d = 0; d < vs.dimension(); ++d) pair.momenta.push_back(vs.symbol({i, {}, vertical == 0, d}));
      out.pairs.push_back(std::move(pair));
    }
  }
  return out;
}

/// Hamilton equations of VH against the deviation of the Hamilton equations of H.
inline CommutationReport check_hamilton_deviation_commute(const HamiltonianSystem& H,
                                                          const EquivalenceOptions& options = {}) {
  const EquationSystem lhs = hamilton_equations(vertical_hamiltonian(H));
  const EquationSystem rhs = deviation_system(as_operator(hamilton_equations(H)));
  const std::size_t m = H.spec.fibre().size();
  const std::size_t n = H.spec.dimension();
  const std::size_t block = n * m + m;  // equations per original system
  CommutationReport report{"Hamilton(VH) = V(Hamilton(H))", {}};
  auto add = [&](std::string label, std::size_t l, std::size_t r) {
    report.pairs.push_back({std::move(label), lhs.equations[l], rhs.equations[r],
                            equivalent(lhs.equations[l], rhs.equations[r], options)});
  };
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& y = H.spec.fibre()[i];
    for (std::size_t d = 0; d < n; ++d) {
      const std::string& x = H.spec.base()[d];
      add("velocity " + y + "_" + x, i * n + d, i * n + d);
      add("velocity v_" + y + "_" + x, (m + i) * n + d, block + i * n + d);
    }
    add("momentum " + y + " (vp)", 2 * m * n + i, block + m * n + i);
    add("momentum v_" + y + " (p)", 2 * m * n + m + i, m * n + i);
  }
  return report;
}

}  // namespace jetvar
