#pragma once

#include <cstddef>
#include <string>

namespace urank {

/// Convex cost phi with phi(0) = 1 and phi(x) >= 1{x >= 0}.
class CostFunction {
 public:
  enum class Kind { Exponential, Logit, Hinge };

  constexpr CostFunction(Kind kind = Kind::Exponential) : kind_(kind) {}  // NOLINT

  [[nodiscard]] constexpr Kind kind() const { return kind_; }
  [[nodiscard]] double value(double x) const;
  /// Right derivative.
  [[nodiscard]] double derivative(double x) const;
  [[nodiscard]] double left_derivative(double x) const;
  [[nodiscard]] const char* name() const;

  static CostFunction exponential() { return CostFunction(Kind::Exponential); }
  static CostFunction logit() { return CostFunction(Kind::Logit); }
  static CostFunction hinge() { return CostFunction(Kind::Hinge); }
  /// Parses "exponential", "logit" or "hinge"; throws InvalidArgument.
  static CostFunction parse(const std::string& name);

  friend constexpr bool operator==(CostFunction a, CostFunction b) { return a.kind_ == b.kind_; }

 private:
  Kind kind_;
};

/// H(rho) = inf_a rho phi(-a) + (1 - rho) phi(a), a in [-50, 50].
double optimal_conditional_cost(const CostFunction& phi, double rho);

/// H^-(rho): the same infimum restricted to a (2 rho - 1) <= 0.
double constrained_conditional_cost(const CostFunction& phi, double rho);

enum class PsiForm {
  /// psi(x) = H^-((1 + x) / 2) - H((1 + x) / 2).
  Calibrated,
  /// psi(x) = H^-((1 + x) / 2) - H^-((1 - x) / 2), kept for comparison; it
  /// vanishes identically for the hinge cost.
  AsDisplayed,
};

/// Calibration function psi on [-1, 1].
double psi(const CostFunction& phi, double x, PsiForm form = PsiForm::Calibrated);

/// Smallest x in [0, 1] with psi(x) >= u, by bisection. Throws
/// InvalidArgument when u lies outside [0, psi(1)].
double psi_inverse(const CostFunction& phi, double u);

/// psi^{-1}(A(f) - A*) clipped to [0, 1]: a bound on L(f) - L*.
double convex_excess_to_rank_bound(double a_excess, const CostFunction& phi);

/// Default radius B_n of the weight or RKHS ball at sample size n:
/// log(n) / 4 for the exponential cost, n^{1/8} otherwise.
double budget_schedule(const CostFunction& phi, std::size_t n);

}  // namespace urank
