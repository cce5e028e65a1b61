#include "urank/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "overloaded.hpp"

namespace urank {
namespace {

using detail::Overloaded;

constexpr double kProbTolerance = 1e-12;

void validate_marginal(const FiniteMarginal& m, std::size_t& dim) {
  if (m.points.empty()) throw InvalidArgument("model: finite marginal has no support points");
  if (m.points.size() != m.probs.size()) {
    throw InvalidArgument("model: " + std::to_string(m.points.size()) + " support points but " +
                          std::to_string(m.probs.size()) + " probabilities");
  }
  dim = m.points.front().size();
  if (dim == 0) throw InvalidArgument("model: support points must have dimension >= 1");
  CompensatedSum total;
  for (std::size_t k = 0; k < m.points.size(); ++k) {
    if (m.points[k].size() != dim) throw InvalidArgument("model: support points differ in dimension");
    for (double v : m.points[k]) {
      if (!std::isfinite(v)) throw InvalidArgument("model: non-finite support coordinate");
    }
    if (!(m.probs[k] >= 0.0) || !std::isfinite(m.probs[k])) {
      throw InvalidArgument("model: probability " + std::to_string(k) + " is negative or not finite");
    }
    total.add(m.probs[k]);
  }
  if (std::abs(total.value() - 1.0) > kProbTolerance) {
    throw InvalidArgument("model: probabilities sum to " + std::to_string(total.value()) +
                          ", expected 1");
  }
}

void validate_marginal(const UniformBox& box, std::size_t& dim) {
  if (box.lo.empty() || box.lo.size() != box.hi.size()) {
    throw InvalidArgument("model: uniform box needs lo/hi of equal, positive length");
  }
  for (std::size_t j = 0; j < box.lo.size(); ++j) {
    if (!std::isfinite(box.lo[j]) || !std::isfinite(box.hi[j]) || !(box.lo[j] < box.hi[j])) {
      throw InvalidArgument("model: uniform box needs finite lo < hi in every coordinate");
    }
  }
  dim = box.lo.size();
}

void validate_marginal(const Marginal& m, std::size_t& dim) {
  std::visit([&](const auto& v) { validate_marginal(v, dim); }, m);
}

const FiniteMarginal* finite_marginal(const SyntheticModel::Variant& v) {
  return std::visit(Overloaded{
                        [](const DiscreteBipartite& b) -> const FiniteMarginal* { return &b.marginal; },
                        [](const NoiselessRegression& r) { return std::get_if<FiniteMarginal>(&r.marginal); },
                        [](const NoisyRegression& r) { return std::get_if<FiniteMarginal>(&r.marginal); },
                    },
                    v);
}

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    cdf[k] = acc;
  }
  return cdf;
}

Point draw_point(const Marginal& marginal, const std::vector<double>& cdf, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const FiniteMarginal& m) { return m.points[rng.discrete(cdf)]; },
                        [&](const UniformBox& b) {
                          Point x(b.lo.size());
                          for (std::size_t j = 0; j < x.size(); ++j) {
                            x[j] = b.lo[j] + (b.hi[j] - b.lo[j]) * rng.uniform();
                          }
                          return x;
                        },
                    },
                    marginal);
}

}  // namespace

// ---------------------------------------------------------------------------

double RealFunction::operator()(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [&](const LinearFn& f) {
            if (f.w.size() != x.size()) throw InvalidArgument("linear function: dimension mismatch");
            double s = f.b;
            for (std::size_t j = 0; j < x.size(); ++j) s += f.w[j] * x[j];
            return s;
          },
          [&](const StepFn& f) {
            if (f.dim >= x.size()) throw InvalidArgument("step function: dimension out of range");
            return x[f.dim] >= f.threshold ? f.high : f.low;
          },
          [](const ConstantFn& f) { return f.value; },
          [&](const TableFn& f) {
            for (std::size_t k = 0; k < f.points.size(); ++k) {
              if (std::equal(f.points[k].begin(), f.points[k].end(), x.begin(), x.end())) {
                return f.values[k];
              }
            }
            throw InvalidArgument("table function: point not in table");
          },
          [&](const CustomFn& f) { return f.fn(x); },
      },
      impl_);
}

FiniteMarginal uniform_grid(double lo, double hi, std::size_t size) {
  if (size == 0 || !(lo < hi)) throw InvalidArgument("uniform_grid: need size >= 1 and lo < hi");
  FiniteMarginal m;
  m.points.reserve(size);
  const double width = (hi - lo) / static_cast<double>(size);
  for (std::size_t k = 0; k < size; ++k) {
    m.points.push_back({lo + (static_cast<double>(k) + 0.5) * width});
  }
  m.probs.assign(size, 1.0 / static_cast<double>(size));
  return m;
}

SyntheticModel::SyntheticModel(Variant v) : impl_(std::move(v)) {
  std::visit(Overloaded{
                 [&](const DiscreteBipartite& b) {
                   validate_marginal(b.marginal, dim_);
                   if (b.eta.size() != b.marginal.points.size()) {
                     throw InvalidArgument("bipartite model: eta must have one entry per support point");
                   }
                   for (double e : b.eta) {
                     if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("bipartite model: eta outside [0, 1]");
                   }
                 },
                 [&](const NoiselessRegression& r) {
                   validate_marginal(r.marginal, dim_);
                   if (const auto* fm = std::get_if<FiniteMarginal>(&r.marginal)) {
                     for (const auto& x : fm->points) {
                       if (!std::isfinite(r.m(x))) throw InvalidArgument("regression model: m(x) not finite");
                     }
                   }
                 },
                 [&](const NoisyRegression& r) {
                   validate_marginal(r.marginal, dim_);
                   if (const auto* fm = std::get_if<FiniteMarginal>(&r.marginal)) {
                     for (const auto& x : fm->points) {
                       if (!std::isfinite(r.m(x))) throw InvalidArgument("regression model: m(x) not finite");
                       const double s = r.sigma(x);
                       if (!(s > 0.0) || !std::isfinite(s)) {
                         throw InvalidArgument("noisy regression model: sigma(x) must be positive");
                       }
                     }
                   }
                 },
             },
             impl_);
}

bool SyntheticModel::has_finite_support() const { return finite_marginal(impl_) != nullptr; }

bool SyntheticModel::has_discrete_labels() const {
  return has_finite_support() && !std::holds_alternative<NoisyRegression>(impl_);
}

const char* SyntheticModel::kind() const {
  return std::visit(Overloaded{
                        [](const DiscreteBipartite&) { return "bipartite"; },
                        [](const NoiselessRegression&) { return "noiseless"; },
                        [](const NoisyRegression&) { return "noisy"; },
                    },
                    impl_);
}

SyntheticModel model_m1() {
  DiscreteBipartite b;
  b.marginal.points = {{0.0}, {1.0}, {2.0}};
  b.marginal.probs = {0.5, 0.25, 0.25};
  b.eta = {0.2, 0.5, 0.9};
  return SyntheticModel(std::move(b));
}

// ---------------------------------------------------------------------------

std::vector<SupportAtom> enumerate_support(const SyntheticModel& model) {
  const FiniteMarginal* fm = finite_marginal(model.variant());
  if (fm == nullptr) {
    throw UnsupportedModel(std::string("enumerate_support: ") + model.kind() +
                           " model has a continuous marginal; discretize it on a grid");
  }
  std::vector<SupportAtom> atoms;
  atoms.reserve(fm->points.size());
  for (std::size_t k = 0; k < fm->points.size(); ++k) {
    SupportAtom a;
    a.x = fm->points[k];
    a.prob = fm->probs[k];
    a.label = std::visit(Overloaded{
                             [&](const DiscreteBipartite& b) -> LabelLaw { return BernoulliLabel{b.eta[k]}; },
                             [&](const NoiselessRegression& r) -> LabelLaw { return PointLabel{r.m(a.x)}; },
                             [&](const NoisyRegression& r) -> LabelLaw {
                               return GaussianLabel{r.m(a.x), r.sigma(a.x)};
                             },
                         },
                         model.variant());
    atoms.push_back(std::move(a));
  }
  return atoms;
}

std::vector<Outcome> enumerate_outcomes(const SyntheticModel& model) {
  if (!model.has_discrete_labels()) {
    throw UnsupportedModel(std::string("enumerate_outcomes: ") + model.kind() +
                           " model has no finite joint support");
  }
  std::vector<Outcome> out;
  const auto atoms = enumerate_support(model);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto& a = atoms[k];
    if (const auto* b = std::get_if<BernoulliLabel>(&a.label)) {
      if (a.prob * b->eta > 0.0) out.push_back({{a.x, 1.0}, a.prob * b->eta, k});
      if (a.prob * (1.0 - b->eta) > 0.0) out.push_back({{a.x, -1.0}, a.prob * (1.0 - b->eta), k});
    } else if (const auto* p = std::get_if<PointLabel>(&a.label)) {
      if (a.prob > 0.0) out.push_back({{a.x, p->value}, a.prob, k});
    }
  }
  return out;
}

PairOrder pair_order(const LabelLaw& a, const LabelLaw& b) {
  return std::visit(
      Overloaded{
          [](const BernoulliLabel& p, const BernoulliLabel& q) {
            return PairOrder{p.eta * (1.0 - q.eta), q.eta * (1.0 - p.eta)};
          },
          [](const PointLabel& p, const PointLabel& q) {
            return PairOrder{p.value > q.value ? 1.0 : 0.0, p.value < q.value ? 1.0 : 0.0};
          },
          [](const GaussianLabel& p, const GaussianLabel& q) {
            const double scale = std::sqrt(p.sd * p.sd + q.sd * q.sd);
            const double d = (p.mean - q.mean) / scale;
            return PairOrder{normal_cdf(d), normal_cdf(-d)};
          },
          [](const auto&, const auto&) -> PairOrder {
            throw InvalidArgument("pair_order: label laws of different kinds");
          },
      },
      a, b);
}

double label_mean(const LabelLaw& law) {
  return std::visit(Overloaded{
                        [](const BernoulliLabel& b) { return 2.0 * b.eta - 1.0; },
                        [](const PointLabel& p) { return p.value; },
                        [](const GaussianLabel& g) { return g.mean; },
                    },
                    law);
}

// ---------------------------------------------------------------------------

Dataset sample_dataset(const SyntheticModel& model, std::size_t n, RngSeed seed) {
  Rng rng(seed);
  return sample_dataset(model, n, rng);
}

Dataset sample_dataset(const SyntheticModel& model, std::size_t n, Rng& rng) {
  if (n < 2) throw InvalidArgument("sample_dataset: n must be >= 2");
  std::vector<LabeledSample> samples;
  samples.reserve(n);
  std::visit(Overloaded{
                 [&](const DiscreteBipartite& b) {
                   const auto cdf = cumulative(b.marginal.probs);
                   for (std::size_t i = 0; i < n; ++i) {
                     const std::size_t k = rng.discrete(cdf);
                     const double y = rng.uniform() <= b.eta[k] ? 1.0 : -1.0;
                     samples.push_back({b.marginal.points[k], y});
                   }
                 },
                 [&](const NoiselessRegression& r) {
                   const auto* fm = std::get_if<FiniteMarginal>(&r.marginal);
                   const auto cdf = fm ? cumulative(fm->probs) : std::vector<double>{};
                   for (std::size_t i = 0; i < n; ++i) {
                     Point x = draw_point(r.marginal, cdf, rng);
                     const double y = r.m(x);
                     samples.push_back({std::move(x), y});
                   }
                 },
                 [&](const NoisyRegression& r) {
                   const auto* fm = std::get_if<FiniteMarginal>(&r.marginal);
                   const auto cdf = fm ? cumulative(fm->probs) : std::vector<double>{};
                   for (std::size_t i = 0; i < n; ++i) {
                     Point x = draw_point(r.marginal, cdf, rng);
                     const double s = r.sigma(x);
                     if (!(s > 0.0)) throw InvalidArgument("noisy regression model: sigma(x) must be positive");
                     const double y = r.m(x) + s * rng.normal();
                     samples.push_back({std::move(x), y});
                   }
                 },
             },
             model.variant());
  return Dataset(model.dim(), std::move(samples));
}

}  // namespace urank
