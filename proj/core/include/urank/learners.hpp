#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urank/cost.hpp"
#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/scoring.hpp"

namespace urank {

// ---------------------------------------------------------------------------
// Empirical risk minimization
// ---------------------------------------------------------------------------

struct ErmResult {
  std::size_t index = 0;  ///< position of the minimizer in the class
  double risk = 0.0;      ///< its empirical risk L_n
};

/// Exact argmin of L_n over a finite class; ties go to the lowest index.
ErmResult erm_finite(std::span<const RankingRule> rules, const Dataset& data);

/// Candidate thresholds per feature dimension (sorted, unique).
struct StumpGrid {
  std::vector<std::vector<double>> thresholds;

  /// Every cut between consecutive distinct sample values, plus one below
  /// the minimum, for each dimension.
  static StumpGrid from_data(const Dataset& data);
  /// Cuts at lo + k (hi - lo) / cells for k = 0..cells on one dimension.
  static StumpGrid uniform(double lo, double hi, std::size_t cells);

  [[nodiscard]] std::size_t size() const;
  /// Sorts and deduplicates each dimension; throws on non-finite values.
  void normalize();
};

struct StumpFit {
  Stump stump;
  double risk = 0.0;
  std::size_t mistakes = 0;  ///< ordered mistaken pairs
};

/// Minimizer of L_n over stumps (dimension, threshold, direction) by a sorted
/// sweep in O((n + T) log n) per dimension. Ties are broken towards the
/// lowest dimension, then the lowest threshold, then direction +1.
StumpFit erm_stumps(const Dataset& data, const StumpGrid& grid);

/// Same search by brute-force evaluation of every stump; reference oracle.
StumpFit erm_stumps_brute(const Dataset& data, const StumpGrid& grid);

// ---------------------------------------------------------------------------
// Convex surrogates
// ---------------------------------------------------------------------------

/// A_n(f) = (1 / (n (n - 1))) sum_{i != j} phi(-sgn(Z_ij) f(X_i, X_j)).
/// Pairs with Z = 0 contribute phi(0) = 1.
double empirical_cost(const PairScorer& f, const Dataset& data, const CostFunction& phi);

/// A(f) for f(x, x') = s(x) - s(x') under a finite-support model.
double convex_risk(const ScoringFunction& s, const SyntheticModel& model, const CostFunction& phi);

/// A* = inf_f A(f) over all pair functions, through the conditional cost H.
double optimal_convex_risk(const SyntheticModel& model, const CostFunction& phi);

// ---------------------------------------------------------------------------
// Boosting over weighted stump ensembles
// ---------------------------------------------------------------------------

enum class StepRule { LineSearch, Fixed };

/// What to do when a step would take sum |w_j| past the budget B.
enum class BudgetPolicy {
  Clip,     ///< shorten the step to land on the budget
  Stop,     ///< end training before the step
  Rescale,  ///< take the step, then shrink all weights onto the budget
};

struct BoostConfig {
  std::size_t rounds = 20;
  StumpGrid base;
  std::optional<double> budget;
  StepRule step = StepRule::LineSearch;
  double fixed_step = 0.5;
  BudgetPolicy policy = BudgetPolicy::Clip;
};

struct BoostRound {
  std::size_t round = 0;
  double objective = 0.0;  ///< A_n after the round
  Stump base;
  double weight = 0.0;
  double l1_norm = 0.0;
};

struct BoostResult {
  ScoringFunction scorer = ScoringFunction(EnsembleScorer{});
  double initial_objective = 0.0;  ///< A_n(0) = 1
  std::vector<BoostRound> log;
  bool stopped_early = false;
  std::string stop_reason;

  [[nodiscard]] double final_objective() const {
    return log.empty() ? initial_objective : log.back().objective;
  }
  [[nodiscard]] double l1_norm() const;
};

/// Greedy coordinate descent of A_n over f(x, x') = F(x) - F(x'),
/// F = sum_j w_j 1{x_{d_j} >= t_j}. Each round takes the base stump and
/// weight with the lowest A_n after an exact line search (bisection on the
/// derivative) and never increases A_n.
BoostResult boost_rank(const Dataset& data, const BoostConfig& config, const CostFunction& phi);

// ---------------------------------------------------------------------------
// Kernel ranking in an RKHS ball
// ---------------------------------------------------------------------------

struct KernelConfig {
  /// Kernel on pair-points; a gaussian with the median-distance bandwidth
  /// when unset.
  std::optional<FeatureKernel> kernel;
  double radius = 1.0;
  std::size_t steps = 200;
  double step0 = 1.0;       ///< eta_t = step0 / sqrt(t + 1)
  bool keep_best = true;    ///< return the best iterate instead of the last
  std::size_t max_anchors = 4096;
};

struct KernelResult {
  KernelExpansion f;
  double bandwidth = 0.0;          ///< 0 for a user kernel
  std::vector<double> objective;   ///< A_n after each step
  std::vector<double> norm_sq;     ///< c^T K c after each projection
  double final_objective = 0.0;
};

/// Projected subgradient descent of A_n over f = sum_q c_q k(w_q, .), the
/// anchors w_q = (X_i, X_j) being the ordered training pairs with Z != 0.
/// After every step c is shrunk onto c^T K c <= B^2.
KernelResult kernel_rank(const Dataset& data, const KernelConfig& config,
                         const CostFunction& phi = CostFunction::hinge());

/// Median Euclidean distance between distinct points (1 if all coincide).
double median_distance(std::span<const Point> points);

}  // namespace urank
