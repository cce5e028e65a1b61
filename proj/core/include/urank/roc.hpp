#pragma once

#include <span>
#include <vector>

#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/scoring.hpp"

namespace urank {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Piecewise-linear ROC curve from (0, 0) to (1, 1).
struct RocCurve {
  std::vector<RocPoint> points;

  /// Largest tpr on the interpolated curve at the given fpr.
  [[nodiscard]] double tpr_at(double fpr) const;
  /// Trapezoidal area under the curve.
  [[nodiscard]] double area() const;
};

/// Empirical ROC: thresholds swept over the distinct scores in decreasing
/// order, one point per threshold. Labels must be -1 or +1, both present.
RocCurve roc_curve(std::span<const double> scores, std::span<const double> labels);

/// Exact ROC of scorer s under a finite-support bipartite model, using the
/// class-conditional laws P(x | Y = +1) and P(x | Y = -1).
RocCurve true_roc(const SyntheticModel& model, const ScoringFunction& s);

/// AUC with ties credited 1/2, via midranks in O(n log n).
double auc(std::span<const double> scores, std::span<const double> labels);

/// Same quantity by counting all positive/negative pairs.
double auc_brute(std::span<const double> scores, std::span<const double> labels);

/// P(s(X) > s(X') | Y = 1, Y' = -1) + P(s(X) = s(X') | ...) / 2 under the model.
double true_auc(const SyntheticModel& model, const ScoringFunction& s);

/// The empirical identity L_n = 2 n+ n- (1 - AUC_n) / (n (n - 1)) for the
/// rule induced by a scorer; residual is the absolute gap between the sides.
struct RiskAucIdentity {
  double l_n = 0.0;
  double auc_n = 0.0;
  double residual = 0.0;
};
RiskAucIdentity risk_auc_identity(std::span<const double> scores, std::span<const double> labels);
RiskAucIdentity risk_auc_identity(const Dataset& data, const ScoringFunction& s);

}  // namespace urank
