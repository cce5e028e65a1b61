#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/random.hpp"
#include "urank/scoring.hpp"

namespace urank {

/// Real function on pairs of labeled samples.
///
/// `symmetric` promises q(a, b) = q(b, a); u_stat then sums unordered pairs
/// only. `degenerate` promises E q(a, (X, Y)) = 0 for every a under the model
/// the kernel was built for.
struct PairKernel {
  using Fn = std::function<double(const LabeledSample&, const LabeledSample&)>;

  Fn fn;
  bool symmetric = false;
  bool degenerate = false;
  std::string name = "kernel";

  double operator()(const LabeledSample& a, const LabeledSample& b) const { return fn(a, b); }
};

PairKernel constant_kernel(double c);

/// q(a, b) = 1{(y - y') r(x, x') < 0}; its mean is the ranking risk L(r).
PairKernel ranking_loss_kernel(RankingRule r);

/// q_r - q_{r*}: the excess-loss kernel whose mean is L(r) - L*.
PairKernel excess_loss_kernel(RankingRule r, const SyntheticModel& model);

/// lambda * q, keeping the flags.
PairKernel scale_kernel(PairKernel q, double lambda);

/// (1 / (n (n - 1))) sum over ordered pairs i != j of q(s_i, s_j).
double u_stat(const PairKernel& q, const Dataset& data);

/// Average of q over the disjoint block pairs (i, floor(n/2) + i).
double split_estimate(const PairKernel& q, const Dataset& data);

/// Hoeffding decomposition U_n = mean + 2 T_n + W_n.
///
/// The projection is taken of the symmetrized kernel (q(a,b) + q(b,a)) / 2,
/// which has the same U-statistic as q, so the decomposition also applies to
/// non-symmetric kernels and coincides with the usual one for symmetric q.
struct HoeffdingParts {
  double mean = 0.0;               ///< E U_n
  std::vector<double> h_values;    ///< h(X_i)
  double t_n = 0.0;
  double w_n = 0.0;
  double u_n = 0.0;
  bool approximate = false;        ///< projections estimated by Monte Carlo
};

struct ProjectionOptions {
  std::size_t mc_inner = 10000;    ///< reference sample size for the MC fallback
  RngSeed seed{0};
};

/// Exact when the model has finite support and discrete labels; otherwise a
/// Monte Carlo reference sample is used and the result is flagged approximate.
HoeffdingParts hoeffding_decompose(const PairKernel& q, const Dataset& data,
                                   const SyntheticModel& model, const ProjectionOptions& options = {});

/// E q((X, Y), (X', Y')) by enumeration.
double kernel_mean(const PairKernel& q, const SyntheticModel& model);

/// The first projection h and the degenerate remainder h-hat of q under a
/// model, both exact on the model's outcome list.
class KernelProjection {
 public:
  KernelProjection(PairKernel q, const SyntheticModel& model);

  [[nodiscard]] double mean() const { return mean_; }
  /// h(a) = E q~(a, (X, Y)) - mean, q~ the symmetrized kernel.
  [[nodiscard]] double h(const LabeledSample& a) const;
  /// h-hat as a symmetric degenerate kernel.
  [[nodiscard]] PairKernel degenerate_kernel() const;
  /// Var h(X, Y).
  [[nodiscard]] double variance() const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
  double mean_ = 0.0;
};

/// Variance of the first Hoeffding projection, Var E(q~(X1, X) | X1).
double conditional_variance(const PairKernel& q, const SyntheticModel& model);

/// max over outcomes a of max(|E q(a, .)|, |E q(., a)|).
double degeneracy_check(const PairKernel& q, const SyntheticModel& model);

/// Chaos quantities of a finite class of degenerate kernels for one draw of
/// Rademacher signs. Diagonal terms f(X_i, X_i) are taken as 0.
///   z_eps = max_f |sum_{i != j} eps_i eps_j f(X_i, X_j)|
///   u_eps = max_f |v_f|_2,   v_f[j] = sum_{i != j} eps_i f(X_i, X_j)
///   m_stat = max_{f, k} |v_f[k]|
struct ChaosStats {
  double z_eps = 0.0;
  double u_eps = 0.0;
  double m_stat = 0.0;
  std::vector<int> eps;
};

ChaosStats chaos_statistics(std::span<const PairKernel> kernels, const Dataset& data, RngSeed seed);
ChaosStats chaos_statistics(std::span<const PairKernel> kernels, const Dataset& data,
                            std::vector<int> eps);

/// max_f |sum_{i != j} f(X_i, X_j)|, the unsigned counterpart of z_eps.
double chaos_sup(std::span<const PairKernel> kernels, const Dataset& data);

}  // namespace urank
