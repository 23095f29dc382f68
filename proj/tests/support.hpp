#pragma once

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "jetvar/jetvar.hpp"

namespace jetvar::testing {

inline BundleSpec ty(int order = 4) { return BundleSpec({"t"}, {"y"}, {}, order); }
inline BundleSpec xty(int order = 4) { return BundleSpec({"x", "t"}, {"y"}, {}, order); }

inline Expr P(const std::string& text, const BundleSpec& spec) { return parse_expression(text, spec); }

inline std::vector<Expr> symbols(const std::vector<std::string>& names, const BundleSpec& spec) {
  std::vector<Expr> out;
  for (const auto& n : names) out.push_back(Expr(spec.require(n)));
  return out;
}

inline ::testing::AssertionResult Equivalent(const Expr& a, const Expr& b) {
  const auto r = equivalent(a, b);
  if (r.verdict == Verdict::equal) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << to_string(a) << "  vs  " << to_string(b) << " : " << to_string(r.verdict);
}

inline ::testing::AssertionResult Same(const Expr& a, const Expr& b) {
  if (identical(normalize(a), normalize(b))) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << to_string(normalize(a)) << "  !=  " << to_string(normalize(b));
}

/// Random expressions over the given leaf names. Powers stay small and arguments of ln and
/// sqrt are shifted away from zero so evaluation at sample points is well defined.
class ExprGenerator {
 public:
  ExprGenerator(std::vector<Expr> leaves, std::uint64_t seed, bool transcendental = true)
      : leaves_(std::move(leaves)), rng_(seed), transcendental_(transcendental) {}

  Expr operator()(int depth) {
    if (depth <= 0 || pick(4) == 0) return leaf();
    switch (pick(transcendental_ ? 7 : 4)) {
      case 0: return (*this)(depth - 1) + (*this)(depth - 1);
      case 1: return (*this)(depth - 1) * (*this)(depth - 1);
      case 2: return (*this)(depth - 1) - (*this)(depth - 1);
      case 3: return pow((*this)(depth - 1), static_cast<long>(pick(3)) + 1);
      case 4: return sin((*this)(depth - 1));
      case 5: return cos((*this)(depth - 1));
      default: return exp(Expr(Rational(1, 4)) * (*this)(depth - 1));
    }
  }

  Expr leaf() {
    if (pick(3) == 0) return Expr(static_cast<long>(pick(7)) - 3);
    return leaves_[pick(leaves_.size())];
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::vector<Expr> leaves_;
  std::mt19937_64 rng_;
  bool transcendental_;
};

}  // namespace jetvar::testing
