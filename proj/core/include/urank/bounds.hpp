#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "urank/cost.hpp"
#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/random.hpp"
#include "urank/scoring.hpp"
#include "urank/ustat.hpp"

namespace urank {

// ---------------------------------------------------------------------------
// Rademacher averages
// ---------------------------------------------------------------------------

struct RademacherEstimate {
  double value = 0.0;
  double std_error = 0.0;  ///< 0 in exact mode
  bool exact = false;
  std::size_t draws = 0;
};

/// sup over the class of (1/m) |sum_i eps_i 1{Z_{i,m+i} r(X_i, X_{m+i}) < 0}|,
/// m = floor(n/2), averaged over `draws` sign vectors.
RademacherEstimate rademacher_mc(std::span<const RankingRule> rules, const Dataset& data, std::size_t draws,
                                 RngSeed seed);

/// Same average over all 2^m sign vectors; requires m <= 20.
RademacherEstimate rademacher_exact(std::span<const RankingRule> rules, const Dataset& data);

/// Same two quantities from a precomputed m-by-|class| indicator table
/// (row i holds the class members' losses on block pair i).
RademacherEstimate rademacher_mc(const std::vector<std::vector<double>>& losses, std::size_t draws, RngSeed seed);
RademacherEstimate rademacher_exact(const std::vector<std::vector<double>>& losses);

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

/// 4 er_n + 4 sqrt(ln(1/delta) / (n - 1)).
double first_order_bound(double er_n, std::size_t n, double delta);

/// c sqrt(V / n).
double vc_rademacher_bound(double vc_dim, std::size_t n, double c = 1.0);

/// C (V log(n / delta) / n)^{1 / (2 - alpha)}.
double fast_rate_bound(double vc_dim, std::size_t n, double delta, double alpha, double c = 1.0);

struct TailBounds {
  double hoeffding = 0.0;   ///< 2 exp(-2 floor(n/2) t^2)
  double bernstein = 0.0;   ///< 2 exp(-floor(n/2) t^2 / (2 sigma^2 + 2t/3))
  double dpg = 0.0;         ///< 4 exp(-n t^2 / (8 s^2 + c t))
};

/// Tail bounds for |U_n - E U_n| > t with kernel variance sigma2 and
/// projection variance s2.
TailBounds tail_bounds(std::size_t n, double t, double sigma2, double s2, double c = 1.0);

/// (2B / n) sqrt(sum of the block-pair diagonal kernel values).
double kernel_class_rademacher(double radius, std::span<const double> diagonal, std::size_t n);

/// 8 B phi'(B) R_n + sqrt(2 B^2 log(1/delta) / n).
double convex_estimation_bound(double radius, const CostFunction& phi, double rademacher, std::size_t n,
                               double delta);

// ---------------------------------------------------------------------------
// Tail experiments
// ---------------------------------------------------------------------------

/// Empirical tail frequencies on a grid of t against bound curves. Bounds that
/// do not apply to the experiment are left empty.
struct TailReport {
  std::vector<double> t;
  std::vector<double> empirical;
  std::vector<double> bound_hoeffding;
  std::vector<double> bound_bernstein;
  std::vector<double> bound_dpg;
  std::vector<double> bound_moment;
  std::size_t replicates = 0;
  std::size_t n = 0;

  // Inputs of the bounds.
  double mean = 0.0;       ///< E U_n (U-statistic experiment)
  double sigma2 = 0.0;     ///< Var q(X1, X2)
  double s2 = 0.0;         ///< variance of the first projection
  double e_z_eps = 0.0;    ///< moment experiment: E Z_eps
  double e_u_eps = 0.0;
  double e_m = 0.0;
  double f_sup = 0.0;      ///< F = sup_f |f|_inf
  double c = 0.0;          ///< constant used by the bound
};

struct TailOptions {
  std::size_t n = 40;
  std::size_t replicates = 10000;
  RngSeed seed{1};
  std::vector<double> t;   ///< default grid when empty
  double c = 1.0;          ///< dpg constant, or the moment bound's C
  std::size_t jobs = 1;
};

/// Tail of |U_n - E U_n| for a kernel with values in [0, 1] against the
/// Hoeffding, Bernstein and de la Pena-Gine curves. Default grid
/// t = 0.02, 0.04, ..., 0.30.
TailReport ustat_tail_harness(const PairKernel& q, const SyntheticModel& model, const TailOptions& options);

/// Tail of Z = sup_f |sum_{i != j} f(X_i, X_j)| beyond C E Z_eps against
/// exp(-(1/C) min((t / E U)^2, t / (E M + F n), (t / (F sqrt n))^{2/3}, sqrt(t / F))).
/// All kernels must be degenerate under the model. Default grid
/// t = k F n (n - 1) / 20, k = 1..20.
TailReport moment_tail_harness(std::span<const PairKernel> kernels, const SyntheticModel& model,
                               const TailOptions& options);

/// The moment bound at one t.
double moment_bound(double t, double c, double e_u, double e_m, double f_sup, std::size_t n);

}  // namespace urank
