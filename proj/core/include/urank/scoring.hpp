#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "urank/model.hpp"

namespace urank {

// ---------------------------------------------------------------------------
// Scoring functions s : X -> R
// ---------------------------------------------------------------------------

/// s(x) = direction * 1{x[dim] >= threshold}, direction in {-1, +1}.
struct Stump {
  std::size_t dim = 0;
  double threshold = 0.0;
  int direction = 1;

  friend bool operator==(const Stump&, const Stump&) = default;
};

struct LinearScorer {
  std::vector<double> w;
};

/// Scores listed per point; evaluating an unlisted point throws.
struct TableScorer {
  std::map<Point, double> scores;
};

class ScoringFunction;

struct EnsembleTerm {
  double weight = 0.0;
  std::shared_ptr<const ScoringFunction> base;
};

/// s(x) = sum_j w_j s_j(x). With 0/1 stump bases the induced pair function
/// s(x) - s(x') = sum_j w_j (s_j(x) - s_j(x')) is a weighted sum of
/// antisymmetrized base ranking rules.
struct EnsembleScorer {
  std::vector<EnsembleTerm> terms;

  [[nodiscard]] double l1_norm() const;
};

struct CallableScorer {
  std::function<double(std::span<const double>)> fn;
  std::string name = "callable";
};

class ScoringFunction {
 public:
  using Variant = std::variant<Stump, LinearScorer, TableScorer, EnsembleScorer, CallableScorer>;

  ScoringFunction(Variant v) : impl_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  template <class T>
    requires(!std::same_as<std::remove_cvref_t<T>, ScoringFunction> &&
             !std::same_as<std::remove_cvref_t<T>, Variant> && std::constructible_from<Variant, T &&>)
  ScoringFunction(T&& v) : impl_(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)

  double operator()(std::span<const double> x) const;
  [[nodiscard]] const Variant& variant() const { return impl_; }

  /// Table scorer from parallel lists of points and scores.
  static ScoringFunction table(const std::vector<Point>& points, const std::vector<double>& scores);
  /// Constant scorer (every pair tied, so the induced rule is +1 everywhere).
  static ScoringFunction constant(double value = 0.0);

 private:
  Variant impl_;
};

std::vector<double> scores_of(const ScoringFunction& s, const Dataset& data);

// ---------------------------------------------------------------------------
// Kernels on pair-points w = (x, x') and kernel expansions
// ---------------------------------------------------------------------------

/// k(w, w') = exp(-|w - w'|^2 / (2 h^2)) on concatenated pair features.
struct GaussianKernel {
  double bandwidth = 1.0;
};

struct CustomKernel {
  std::function<double(std::span<const double>, std::span<const double>)> fn;
  std::string name = "custom";
};

class FeatureKernel {
 public:
  using Variant = std::variant<GaussianKernel, CustomKernel>;

  FeatureKernel() : impl_(GaussianKernel{}) {}
  FeatureKernel(Variant v) : impl_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  double operator()(std::span<const double> a, std::span<const double> b) const;
  [[nodiscard]] const Variant& variant() const { return impl_; }

 private:
  Variant impl_;
};

/// Concatenation (x, x') used as the kernel argument.
Point pair_point(std::span<const double> x, std::span<const double> x_prime);

/// f(x, x') = sum_j c_j k(w_j, (x, x')).
struct KernelExpansion {
  FeatureKernel kernel;
  std::vector<Point> anchors;
  std::vector<double> coef;

  double operator()(std::span<const double> x, std::span<const double> x_prime) const;
  /// RKHS norm sqrt(c^T K c).
  [[nodiscard]] double rkhs_norm() const;
};

// ---------------------------------------------------------------------------
// Pair scorers f : X x X -> R
// ---------------------------------------------------------------------------

/// f(x, x') = s(x) - s(x').
struct ScoreDifference {
  ScoringFunction scorer;
};

struct CallablePairScorer {
  std::function<double(std::span<const double>, std::span<const double>)> fn;
  std::string name = "callable";
};

class PairScorer {
 public:
  using Variant = std::variant<ScoreDifference, KernelExpansion, CallablePairScorer>;

  PairScorer(Variant v) : impl_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  PairScorer(ScoringFunction s) : impl_(ScoreDifference{std::move(s)}) {}  // NOLINT

  double operator()(std::span<const double> x, std::span<const double> x_prime) const;
  [[nodiscard]] const Variant& variant() const { return impl_; }

 private:
  Variant impl_;
};

// ---------------------------------------------------------------------------
// Ranking rules r : X x X -> {-1, +1}
// ---------------------------------------------------------------------------

/// r(x, x') = 2 * 1{s(x) >= s(x')} - 1; score ties rank +1.
struct FromScorer {
  ScoringFunction scorer;
};

/// r(x, x') = +1 if f(x, x') > 0, -1 otherwise.
struct FromPairScorer {
  PairScorer f;
};

/// Bayes rule of a model, r*(x, x') = 2 * 1{rho+ >= rho-} - 1, realized by
/// its optimal scorer (eta for bipartite models, m for regression models).
struct BayesRule {
  ScoringFunction scorer;
};

struct PairFunctionRule {
  std::function<int(std::span<const double>, std::span<const double>)> fn;
  std::string name = "pair-function";
};

class RankingRule {
 public:
  using Variant = std::variant<FromScorer, FromPairScorer, BayesRule, PairFunctionRule>;

  RankingRule(Variant v) : impl_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  int operator()(std::span<const double> x, std::span<const double> x_prime) const;
  [[nodiscard]] const Variant& variant() const { return impl_; }

  /// The scorer when the rule is induced by score comparison, else nullptr.
  [[nodiscard]] const ScoringFunction* scorer() const;

  static RankingRule from_scorer(ScoringFunction s) { return RankingRule(FromScorer{std::move(s)}); }

 private:
  Variant impl_;
};

/// Evaluates a rule on a fixed list of points, precomputing scores when the
/// rule is score-based. Used by every O(n^2) pair loop.
class RuleMatrix {
 public:
  RuleMatrix(const RankingRule& rule, const std::vector<Point>& points);

  [[nodiscard]] int operator()(std::size_t i, std::size_t j) const {
    if (!scores_.empty()) return scores_[i] >= scores_[j] ? 1 : -1;
    return values_[i * n_ + j];
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> scores_;
  std::vector<signed char> values_;
};

}  // namespace urank
