#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "urank/dataset.hpp"
#include "urank/random.hpp"

namespace urank {

using Point = std::vector<double>;

// ---------------------------------------------------------------------------
// Real functions on the feature space (regression function m, noise level σ)
// ---------------------------------------------------------------------------

struct LinearFn {
  std::vector<double> w;
  double b = 0.0;
};

/// low below the threshold on coordinate `dim`, high at or above it.
struct StepFn {
  std::size_t dim = 0;
  double threshold = 0.0;
  double low = 0.0;
  double high = 1.0;
};

struct ConstantFn {
  double value = 0.0;
};

/// Explicit values on a finite set of points; evaluating elsewhere throws.
struct TableFn {
  std::vector<Point> points;
  std::vector<double> values;
};

/// Arbitrary callable; not serializable.
struct CustomFn {
  std::function<double(std::span<const double>)> fn;
  std::string name = "custom";
};

class RealFunction {
 public:
  using Variant = std::variant<LinearFn, StepFn, ConstantFn, TableFn, CustomFn>;

  RealFunction() : impl_(ConstantFn{}) {}
  RealFunction(Variant v) : impl_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  template <class T>
    requires(!std::same_as<std::remove_cvref_t<T>, RealFunction> && !std::same_as<std::remove_cvref_t<T>, Variant> &&
             std::constructible_from<Variant, T &&>)
  RealFunction(T&& v) : impl_(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)

  double operator()(std::span<const double> x) const;
  [[nodiscard]] const Variant& variant() const { return impl_; }

 private:
  Variant impl_;
};

// ---------------------------------------------------------------------------
// Marginal laws of X
// ---------------------------------------------------------------------------

struct FiniteMarginal {
  std::vector<Point> points;
  std::vector<double> probs;
};

/// Continuous uniform law on a box; sampling only (no exact expectations).
struct UniformBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

using Marginal = std::variant<FiniteMarginal, UniformBox>;

/// Uniform law on the `size` cell midpoints of [lo, hi] (one dimension).
FiniteMarginal uniform_grid(double lo, double hi, std::size_t size);

// ---------------------------------------------------------------------------
// Generative models of (X, Y)
// ---------------------------------------------------------------------------

/// Finite support, labels in {-1, +1} with P(Y = 1 | X = x_k) = eta_k.
struct DiscreteBipartite {
  FiniteMarginal marginal;
  std::vector<double> eta;
};

/// Y = m(X).
struct NoiselessRegression {
  Marginal marginal;
  RealFunction m;
};

/// Y = m(X) + sigma(X) * eps with eps standard gaussian.
struct NoisyRegression {
  Marginal marginal;
  RealFunction m;
  RealFunction sigma;
};

/// Validated, immutable generative law of (X, Y).
class SyntheticModel {
 public:
  using Variant = std::variant<DiscreteBipartite, NoiselessRegression, NoisyRegression>;

  /// Throws InvalidArgument on inconsistent parameters: probabilities that are
  /// negative or do not sum to 1 within 1e-12, eta outside [0, 1], sigma <= 0
  /// on a finite support, mismatched lengths or dimensions.
  explicit SyntheticModel(Variant v);

  [[nodiscard]] const Variant& variant() const { return impl_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool has_finite_support() const;
  /// Finite support and labels with finitely many values (bipartite, noiseless).
  [[nodiscard]] bool has_discrete_labels() const;
  [[nodiscard]] const char* kind() const;

  [[nodiscard]] const DiscreteBipartite* bipartite() const {
    return std::get_if<DiscreteBipartite>(&impl_);
  }
  [[nodiscard]] const NoiselessRegression* noiseless() const {
    return std::get_if<NoiselessRegression>(&impl_);
  }
  [[nodiscard]] const NoisyRegression* noisy() const {
    return std::get_if<NoisyRegression>(&impl_);
  }

 private:
  Variant impl_;
  std::size_t dim_ = 0;
};

/// The three-point bipartite model used throughout the tests:
/// support {0, 1, 2}, probabilities {0.5, 0.25, 0.25}, eta {0.2, 0.5, 0.9}.
SyntheticModel model_m1();

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

struct BernoulliLabel {
  double eta = 0.5;  ///< P(Y = +1); Y in {-1, +1}
};
struct PointLabel {
  double value = 0.0;
};
struct GaussianLabel {
  double mean = 0.0;
  double sd = 1.0;
};
using LabelLaw = std::variant<BernoulliLabel, PointLabel, GaussianLabel>;

struct SupportAtom {
  Point x;
  double prob = 0.0;
  LabelLaw label;
};

/// Every support point with its probability and conditional label law.
/// Throws UnsupportedModel for continuous marginals.
std::vector<SupportAtom> enumerate_support(const SyntheticModel& model);

/// A fully specified outcome (x, y) with positive probability.
struct Outcome {
  LabeledSample sample;
  double prob = 0.0;
  std::size_t atom = 0;  ///< index into enumerate_support()
};

/// Joint law of (X, Y) as a finite list. Requires has_discrete_labels().
std::vector<Outcome> enumerate_outcomes(const SyntheticModel& model);

/// P(Y > Y') and P(Y < Y') for independent labels drawn from the two laws.
struct PairOrder {
  double plus = 0.0;
  double minus = 0.0;
};
PairOrder pair_order(const LabelLaw& a, const LabelLaw& b);

/// E[Y | X = atom] (used for regression scorers and diagnostics).
double label_mean(const LabelLaw& law);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// n i.i.d. draws from the joint law; deterministic given the seed.
Dataset sample_dataset(const SyntheticModel& model, std::size_t n, RngSeed seed);

/// Same as above, continuing an existing stream.
Dataset sample_dataset(const SyntheticModel& model, std::size_t n, Rng& rng);

}  // namespace urank
