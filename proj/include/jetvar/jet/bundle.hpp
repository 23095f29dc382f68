#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetvar/core/error.hpp"
#include "jetvar/core/expr.hpp"

namespace jetvar {

/// Symmetric multi-index: a multiset of base directions kept sorted in declaration order,
/// so y_xt and y_tx are the same coordinate.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::size_t> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<std::size_t>& entries() const noexcept { return entries_; }

  MultiIndex with(std::size_t direction) const {
    auto e = entries_;
    e.push_back(direction);
    return MultiIndex(std::move(e));
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<std::size_t> entries_;
};

/// All multi-indices over `dimension` directions with 1 <= |Λ| <= max_length.
inline std::vector<MultiIndex> multi_indices(std::size_t dimension, std::size_t max_length) {
  std::vector<MultiIndex> out;
  std::vector<std::vector<std::size_t>> layer{{}};
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : layer) {
      const std::size_t start = prefix.empty() ? 0 : prefix.back();
      for (std::size_t d = start; d < dimension; ++d) {
        auto e = prefix;
        e.push_back(d);
        out.emplace_back(e);
        next.push_back(std::move(e));
      }
    }
    layer = std::move(next);
  }
  return out;
}

/// A coordinate y^i_Λ, its vertical partner v^i_Λ, or a (vertical) polymomentum p^λ_i
/// together with its jets. The vertical partner of a jet and the jet of a vertical
/// coordinate are the same value, so VJ^rY = J^r(VY) holds by construction.
struct JetCoordinate {
  std::size_t field = 0;
  MultiIndex index;
  bool vertical = false;
  std::optional<std::size_t> momentum;

  JetCoordinate root() const { return {field, {}, vertical, momentum}; }
  JetCoordinate partner() const { return {field, index, true, momentum}; }
  JetCoordinate projection() const { return {field, index, false, momentum}; }
  JetCoordinate prolonged(std::size_t direction) const { return {field, index.with(direction), vertical, momentum}; }

  friend auto operator<=>(const JetCoordinate&, const JetCoordinate&) = default;
  friend bool operator==(const JetCoordinate&, const JetCoordinate&) = default;
};

struct Parameter {
  std::string name;
  std::optional<Rational> value;
};

namespace detail {

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

inline constexpr std::array<std::string_view, 8> kReservedNames = {"pi", "sin", "cos", "tan", "exp", "ln", "sqrt", "v"};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Coordinate atlas of J^rY (and of J^r(VY) once vertically extended): base coordinates
/// x^λ, fibre coordinates y^i, parameters, the tracked jet order, and whether vertical
/// partners and polymomenta are part of the atlas.
///
/// Generated names: jets `y_tt`, `u_xt`; vertical partners `v_y`, `v_y_tt`; momenta
/// `pt_y`; vertical momenta `vpt_y`; momentum jets `pt_y_t`.
class BundleSpec {
 public:
  BundleSpec(std::vector<std::string> base, std::vector<std::string> fibre, std::vector<Parameter> params = {},
             int order = 0)
      : base_(std::move(base)), fibre_(std::move(fibre)), params_(std::move(params)), order_(order) {
    validate();
  }

  const std::vector<std::string>& base() const noexcept { return base_; }
  const std::vector<std::string>& fibre() const noexcept { return fibre_; }
  const std::vector<Parameter>& params() const noexcept { return params_; }
  std::size_t dimension() const noexcept { return base_.size(); }
  int order() const noexcept { return order_; }
  bool vertical() const noexcept { return vertical_; }
  bool has_momenta() const noexcept { return momenta_; }

  BundleSpec with_order(int order) const {
    if (order < 0) throw JetError("jet order must be non-negative");
    BundleSpec s = *this;
    s.order_ = order;
    return s;
  }

  BundleSpec with_momenta() const {
    BundleSpec s = *this;
    s.momenta_ = true;
    return s;
  }

  BundleSpec with_params(std::vector<Parameter> params) const {
    BundleSpec s = *this;
    s.params_ = std::move(params);
    s.validate();
    return s;
  }

  /// The atlas of VY. Only a single vertical extension is supported.
  BundleSpec vertical_extension() const {
    if (vertical_) throw JetError("vertical derivative applied twice");
    BundleSpec s = *this;
    s.vertical_ = true;
    return s;
  }

  /// The atlas of Y underlying a vertically extended one.
  BundleSpec projection() const {
    BundleSpec s = *this;
    s.vertical_ = false;
    return s;
  }

  /// Fibre coordinates of this atlas: y^i, followed by v^i when vertically extended.
  std::vector<JetCoordinate> fields() const {
    std::vector<JetCoordinate> out;
    for (std::size_t i = 0; i < fibre_.size(); ++i) out.push_back({i, {}, false, std::nullopt});
    if (vertical_) {
      for (std::size_t i = 0; i < fibre_.size(); ++i) out.push_back({i, {}, true, std::nullopt});
    }
    return out;
  }

  std::string suffix(const MultiIndex& index) const {
    std::string s;
    for (auto d : index.entries()) s += base_.at(d);
    return s;
  }

  std::string name(const JetCoordinate& c) const {
    std::string n;
    if (c.momentum) {
      n = (c.vertical ? "vp" : "p") + base_.at(*c.momentum) + "_" + fibre_.at(c.field);
    } else {
      n = (c.vertical ? "v_" : "") + fibre_.at(c.field);
    }
    if (!c.index.empty()) n += "_" + suffix(c.index);
    return n;
  }

  /// Symbol for a coordinate; throws JetError when the jet order exceeds `order()`.
  Symbol symbol(const JetCoordinate& c) const {
    if (static_cast<int>(c.index.size()) > order_) {
      throw JetError("jet order overflow: '" + name(c) + "' exceeds order " + std::to_string(order_));
    }
    SymbolKind kind = SymbolKind::fibre;
    if (c.momentum) {
      kind = c.vertical ? SymbolKind::vertical_momentum : SymbolKind::momentum;
    } else if (c.vertical) {
      kind = SymbolKind::vertical;
    } else if (!c.index.empty()) {
      kind = SymbolKind::jet;
    }
    return {name(c), kind, static_cast<int>(c.index.size())};
  }

  Symbol base_symbol(std::size_t direction) const { return Symbol::base(base_.at(direction)); }

  std::optional<std::size_t> base_index(std::string_view name) const {
    for (std::size_t i = 0; i < base_.size(); ++i) {
      if (base_[i] == name) return i;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> fibre_index(std::string_view name) const {
    for (std::size_t i = 0; i < fibre_.size(); ++i) {
      if (fibre_[i] == name) return i;
    }
    return std::nullopt;
  }

  const Parameter* parameter(std::string_view name) const {
    for (const auto& p : params_) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  /// Decomposes a concatenation of base names into a multi-index; nullopt if impossible.
  /// Throws JetError if the decomposition is not unique.
  std::optional<MultiIndex> parse_suffix(std::string_view s) const {
    if (s.empty()) return std::nullopt;
    // ways[i]: number of decompositions of s[i..]; choice[i]: a base that starts one.
    std::vector<int> ways(s.size() + 1, 0);
    std::vector<std::size_t> choice(s.size() + 1, 0);
    ways[s.size()] = 1;
    for (std::size_t i = s.size(); i-- > 0;) {
      for (std::size_t b = 0; b < base_.size(); ++b) {
        if (s.substr(i).starts_with(base_[b]) && ways[i + base_[b].size()] > 0) {
          ways[i] += ways[i + base_[b].size()];
          choice[i] = b;
        }
      }
      ways[i] = std::min(ways[i], 2);
    }
    if (ways[0] == 0) return std::nullopt;
    if (ways[0] > 1) throw JetError("ambiguous jet suffix '" + std::string(s) + "'");
    std::vector<std::size_t> entries;
    for (std::size_t i = 0; i < s.size(); i += base_[choice[i]].size()) entries.push_back(choice[i]);
    return MultiIndex(std::move(entries));
  }

  /// Reads a generated coordinate name back into a JetCoordinate, independently of
  /// whether this atlas is vertically extended or carries momenta.
  std::optional<JetCoordinate> jet_coordinate(const std::string& name) const {
    const auto parts = detail::split(name, '_');
    auto with_suffix = [&](JetCoordinate c, std::size_t first_suffix) -> std::optional<JetCoordinate> {
      if (parts.size() == first_suffix) return c;
      if (parts.size() != first_suffix + 1) return std::nullopt;
      auto index = parse_suffix(parts[first_suffix]);
      if (!index) return std::nullopt;
      c.index = std::move(*index);
      return c;
    };
    if (parts.size() > 3) return std::nullopt;
    if (auto f = fibre_index(parts[0])) return with_suffix({*f, {}, false, std::nullopt}, 1);
    if (parts.size() < 2) return std::nullopt;
    if (parts[0] == "v") {
      if (auto f = fibre_index(parts[1])) return with_suffix({*f, {}, true, std::nullopt}, 2);
      return std::nullopt;
    }
    const bool vertical = parts[0].starts_with("vp");
    if (vertical || parts[0].starts_with("p")) {
      auto lambda = base_index(std::string_view(parts[0]).substr(vertical ? 2 : 1));
      auto f = fibre_index(parts[1]);
      if (lambda && f) return with_suffix({*f, {}, vertical, *lambda}, 2);
    }
    return std::nullopt;
  }

  /// Resolves a name to a symbol of this atlas, honoring the jet order, the vertical
  /// extension and the presence of momenta. Returns nullopt for names it does not declare.
  std::optional<Symbol> resolve(const std::string& name) const {
    if (base_index(name)) return Symbol::base(name);
    if (parameter(name)) return Symbol::parameter(name);
    auto c = jet_coordinate(name);
    if (!c) return std::nullopt;
    if (c->vertical && !vertical_) return std::nullopt;
    if (c->momentum && !momenta_) return std::nullopt;
    if (static_cast<int>(c->index.size()) > order_) return std::nullopt;
    return symbol(*c);
  }

  Symbol require(const std::string& name) const {
    auto s = resolve(name);
    if (!s) throw UnknownSymbolError(name);
    return *s;
  }

 private:
  void validate() const {
    if (base_.empty()) throw JetError("bundle needs at least one base coordinate");
    if (fibre_.empty()) throw JetError("bundle needs at least one fibre coordinate");
    if (order_ < 0) throw JetError("jet order must be non-negative");
    std::vector<std::string> all = base_;
    all.insert(all.end(), fibre_.begin(), fibre_.end());
    for (const auto& p : params_) all.push_back(p.name);
    for (const auto& n : all) check_name(n);
    auto sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end()) {
      throw JetError("name '" + *it + "' declared twice");
    }
    for (const auto& f : fibre_) {
      for (const auto& b : base_) {
        if (f == "p" + b || f == "vp" + b) {
          throw JetError("fibre name '" + f + "' collides with generated momentum names");
        }
      }
    }
  }

  static void check_name(const std::string& n) {
    if (n.find('_') != std::string::npos) {
      throw JetError("name '" + n + "' collides with generated coordinate names (reserved '_' forms)");
    }
    if (!detail::is_identifier(n)) throw JetError("invalid identifier '" + n + "'");
    for (auto r : detail::kReservedNames) {
      if (n == r) throw JetError("name '" + n + "' is reserved");
    }
  }

  std::vector<std::string> base_;
  std::vector<std::string> fibre_;
  std::vector<Parameter> params_;
  int order_ = 0;
  bool vertical_ = false;
  bool momenta_ = false;
};

/// Highest jet order of any coordinate symbol in `e` (momenta included).
inline int jet_order(const Expr& e, const BundleSpec& spec) {
  int r = 0;
  for (const auto& s : free_symbols(e)) {
    if (auto c = spec.jet_coordinate(s.name())) r = std::max(r, static_cast<int>(c->index.size()));
  }
  return r;
}

inline bool has_vertical_symbols(const Expr& e, const BundleSpec& spec) {
  for (const auto& s : free_symbols(e)) {
    if (auto c = spec.jet_coordinate(s.name()); c && c->vertical) return true;
  }
  return false;
}

}  // namespace jetvar
