#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/random.hpp"
#include "urank/scoring.hpp"

namespace urank {

/// L_n(r) = (1 / (n (n - 1))) sum_{i != j} 1{Z_ij r(X_i, X_j) < 0}.
double empirical_risk(const RankingRule& r, const Dataset& data);

/// Same, from precomputed scores of a scorer-induced rule.
double empirical_risk(std::span<const double> scores, std::span<const double> labels);

/// Exact pairwise law of a finite-support model: atoms with their
/// probabilities and the pair orders rho+ = P(Y > Y'), rho- = P(Y < Y').
/// Reusable across many risk evaluations on the same model.
class PairLaw {
 public:
  explicit PairLaw(const SyntheticModel& model);

  [[nodiscard]] std::size_t size() const { return atoms_.size(); }
  [[nodiscard]] const std::vector<SupportAtom>& atoms() const { return atoms_; }
  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] PairOrder order(std::size_t a, std::size_t b) const {
    return {plus_[a * atoms_.size() + b], plus_[b * atoms_.size() + a]};
  }

  /// L(r) = sum_{a,b} p_a p_b (rho+ 1{r < 0} + rho- 1{r > 0}).
  [[nodiscard]] double risk(const RankingRule& r) const;
  /// L(r) for a scorer-induced rule given per-atom scores.
  [[nodiscard]] double risk_from_scores(std::span<const double> scores) const;
  /// sum_{a,b} p_a p_b |rho+ - rho-| 1{r(a,b) != r*(a,b)} for per-atom scores.
  [[nodiscard]] double excess_from_scores(std::span<const double> scores) const;
  /// L* = sum_{a,b} p_a p_b min(rho+, rho-).
  [[nodiscard]] double bayes_risk() const;

 private:
  std::vector<SupportAtom> atoms_;
  std::vector<Point> points_;
  std::vector<double> plus_;  // rho+ of the ordered atom pair, row-major
};

/// Exact excess risk of every stump under a finite-support model. One
/// O(atoms^2) sweep per dimension, then O(log atoms) per lookup.
class StumpExcessTable {
 public:
  explicit StumpExcessTable(const PairLaw& law);

  [[nodiscard]] double excess(const Stump& s) const;
  /// Smallest excess over all stumps (0 when a stump realizes r*).
  [[nodiscard]] double min_excess() const;

 private:
  struct Dimension {
    std::vector<double> values;  // distinct atom coordinates, ascending
    std::vector<double> cross;   // cross[k]: sum of S_ab over a below, b above the k-th cut
  };
  std::vector<Dimension> dims_;
  double base_ = 0.0;  // mass of the pairs with r* = -1
};

/// L(r) = P{Z r(X, X') < 0} by enumeration. Requires finite support.
double true_risk(const RankingRule& r, const SyntheticModel& model);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

/// L(r) from `pairs` independent pairs drawn from the model.
MonteCarloEstimate true_risk_mc(const RankingRule& r, const SyntheticModel& model, std::size_t pairs,
                                RngSeed seed);

/// The scorer whose induced rule is Bayes-optimal: eta for bipartite models
/// and m for regression models. Ties rank +1.
ScoringFunction bayes_scorer(const SyntheticModel& model);
RankingRule bayes_rule(const SyntheticModel& model);

/// L* per model variant: bipartite closed form (checked against the
/// Gini-form), 0 for noiseless regression, E Phi(-|Delta|) for noisy
/// regression on a finite support.
double bayes_risk(const SyntheticModel& model);

/// The bipartite closed forms of L*.
struct BayesRiskForms {
  double min_form = 0.0;   ///< E min(eta, eta') - (E eta)^2
  double gini_form = 0.0;  ///< p (1 - p) - E|eta - eta'| / 2
  double enumeration = 0.0;
};
BayesRiskForms bayes_risk_forms(const SyntheticModel& model);

/// L(s) - L* as sum_{a,b} p_a p_b |rho+ - rho-| over the pairs where the rule
/// of s disagrees with r*. Requires finite support.
double excess_risk(const ScoringFunction& s, const SyntheticModel& model);

/// Var h_s(X, Y), h_s the first projection of the excess-loss kernel.
/// Exact on discrete labels; quadrature over the gaussian label otherwise.
double h_variance(const ScoringFunction& s, const SyntheticModel& model);

/// sup_x E_{X'} |D(x, X')|^{-alpha}, D = eta(x) - eta(x') for bipartite models
/// and Delta(x, x') for noisy regression.
///
/// `value` excludes the atoms with D(x, x') = 0. When such atoms carry
/// positive probability the literal condition is infinite: `atom_collision`
/// is set and `strict_value` is +inf (for alpha > 0).
struct NoiseConstant {
  double value = 0.0;
  double strict_value = 0.0;
  bool atom_collision = false;
  double collision_mass = 0.0;  ///< largest P(D(x, X') = 0) over x
};
NoiseConstant noise_constant(const SyntheticModel& model, double alpha);

/// E|eta(X) - eta(X')| for a bipartite model.
double gini_mean_difference(const SyntheticModel& model);

/// Delta(x, x') = (m(x) - m(x')) / sqrt(sigma^2(x) + sigma^2(x')).
double delta(const NoisyRegression& model, std::span<const double> x, std::span<const double> x_prime);

}  // namespace urank
