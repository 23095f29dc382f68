#pragma once

#include <string>
#include <vector>

#include "jetvar/core/calculus.hpp"
#include "jetvar/jet/bundle.hpp"

namespace jetvar {

/// d_λ e = ∂_λ e + Σ y^i_{Λ+λ} ∂e/∂y^i_Λ over every jet, vertical jet and momentum jet in e.
inline Expr total_derivative(const Expr& e, std::size_t direction, const BundleSpec& spec) {
  const Expr f = normalize(e);
  std::vector<Expr> terms;
  terms.push_back(diff(f, spec.base_symbol(direction)));
  for (const auto& s : free_symbols(f)) {
    auto c = spec.jet_coordinate(s.name());
    if (!c) continue;
    terms.push_back(Expr(spec.symbol(c->prolonged(direction))) * diff(f, s));
  }
  return normalize(Expr::add(std::move(terms)));
}

inline Expr total_derivative(const Expr& e, const std::string& base_name, const BundleSpec& spec) {
  auto d = spec.base_index(base_name);
  if (!d) throw UnknownSymbolError(base_name);
  return total_derivative(e, *d, spec);
}

/// d_Λ as the composition of d_λ over the entries of Λ.
inline Expr iterated_total_derivative(const Expr& e, const MultiIndex& index, const BundleSpec& spec) {
  Expr out = normalize(e);
  for (auto d : index.entries()) out = total_derivative(out, d, spec);
  return out;
}

/// d_V e = Σ v^i_Λ ∂e/∂y^i_Λ + Σ vp^λ_i ∂e/∂p^λ_i. Rejects input that already carries
/// vertical coordinates.
inline Expr vertical_derivative(const Expr& e, const BundleSpec& spec) {
  const Expr f = normalize(e);
  const BundleSpec vspec = spec.vertical() ? spec : spec.vertical_extension();
  std::vector<Expr> terms;
  const auto symbols = free_symbols(f);
  for (const auto& s : symbols) {
    auto c = spec.jet_coordinate(s.name());
    if (c && c->vertical) throw JetError("vertical derivative applied twice");
  }
  for (const auto& s : symbols) {
    auto c = spec.jet_coordinate(s.name());
    if (!c) continue;
    terms.push_back(Expr(vspec.symbol(c->partner())) * diff(f, s));
  }
  return normalize(Expr::add(std::move(terms)));
}

/// Partial derivative by name, validated against the atlas.
inline Expr diff(const Expr& e, const std::string& name, const BundleSpec& spec) {
  return diff(e, spec.require(name));
}

}  // namespace jetvar
