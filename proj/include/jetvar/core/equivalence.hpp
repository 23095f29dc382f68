#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "jetvar/core/calculus.hpp"
#include "jetvar/core/evaluate.hpp"

namespace jetvar {

enum class Verdict { equal, not_equal, undetermined };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::equal: return "equal";
    case Verdict::not_equal: return "not-equal";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

struct EquivalenceOptions {
  std::uint64_t seed = 0x6a657476;
  int points = 32;
  double tolerance = 1e-9;
  /// Draw at most this many candidates per required point before giving up.
  int attempts_per_point = 8;
};

struct EquivalenceResult {
  Verdict verdict = Verdict::undetermined;
  /// True when decided by canonical-form cancellation alone.
  bool symbolic = false;
  /// Separating point for not_equal verdicts.
  std::optional<Point> witness;
  int points_checked = 0;

  explicit operator bool() const { return verdict == Verdict::equal; }
};

namespace detail {

/// Uniform draw from [-2,-0.1] U [0.1,2]. Bit-level conversion keeps it reproducible
/// across standard library implementations.
inline double sample_coordinate(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double x = u * 3.8;
  return x < 1.9 ? -2.0 + x : 0.1 + (x - 1.9);
}

}  // namespace detail

/// Decides a == b: first by normalizing a - b, then by evaluating at pseudo-random points.
/// `not_equal` is only returned with a witness point.
inline EquivalenceResult equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& options = {}) {
  EquivalenceResult result;
  const Expr difference = normalize(a - b);
  if (difference.is_zero()) {
    result.verdict = Verdict::equal;
    result.symbolic = true;
    return result;
  }
  SymbolSet symbols = free_symbols(a);
  collect_symbols(b, symbols);

  std::mt19937_64 rng(options.seed);
  const int max_attempts = options.points * options.attempts_per_point;
  int valid = 0;
  for (int attempt = 0; attempt < max_attempts && valid < options.points; ++attempt) {
    Point point;
    for (const auto& s : symbols) point[s.name()] = detail::sample_coordinate(rng);
    double va = 0.0;
    double vb = 0.0;
    try {
      va = eval(a, point);
      vb = eval(b, point);
    } catch (const EvaluationError&) {
      continue;
    }
    if (!std::isfinite(va) || !std::isfinite(vb)) continue;
    ++valid;
    const double scale = 1.0 + std::max(std::abs(va), std::abs(vb));
    if (std::abs(va - vb) >= options.tolerance * scale) {
      result.verdict = Verdict::not_equal;
      result.witness = std::move(point);
      result.points_checked = valid;
      return result;
    }
  }
  result.points_checked = valid;
  result.verdict = valid >= options.points ? Verdict::equal : Verdict::undetermined;
  return result;
}

}  // namespace jetvar
