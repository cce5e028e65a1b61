#include "urank/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <utility>

#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/risk.hpp"

namespace urank {
namespace {

// Fenwick tree of counts over label ranks.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t i, std::int64_t v) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += v;
  }
  /// Sum over ranks [0, i).
  [[nodiscard]] std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

std::int64_t choose2(std::int64_t k) { return k * (k - 1) / 2; }

void require_grid(const Dataset& data, const StumpGrid& grid) {
  data.require_pairs("erm_stumps");
  if (grid.size() == 0) throw InvalidArgument("erm_stumps: empty threshold grid");
  if (grid.thresholds.size() != data.dim()) {
    throw InvalidArgument("erm_stumps: grid has " + std::to_string(grid.thresholds.size()) +
                          " dimensions, data has " + std::to_string(data.dim()));
  }
}

// Ordered pairs with Z != 0 as (higher label, lower label) unordered pairs.
std::vector<std::pair<std::uint32_t, std::uint32_t>> cross_pairs(const Dataset& data) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int z = label_order(data[i].y, data[j].y);
      if (z > 0) out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      if (z < 0) out.emplace_back(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

struct Candidate {
  std::size_t dim = 0;
  double threshold = 0.0;
};

struct ActivePair {
  std::uint32_t pair = 0;
  int sign = 0;  // g(x_high_label) - g(x_low_label)
};

// Line search of w -> sum_active phi(-m_p - s_p w) on [lo_cap, hi_cap].
class LineProblem {
 public:
  LineProblem(const std::vector<ActivePair>& active, const std::vector<double>& margins, const CostFunction& phi)
      : active_(active), margins_(margins), phi_(phi) {}

  [[nodiscard]] double right_derivative(double w) const {
    CompensatedSum s;
    for (const auto& a : active_) {
      const double arg = -margins_[a.pair] - a.sign * w;
      s.add(a.sign > 0 ? -phi_.left_derivative(arg) : phi_.derivative(arg));
    }
    return s.value();
  }
  [[nodiscard]] double left_derivative(double w) const {
    CompensatedSum s;
    for (const auto& a : active_) {
      const double arg = -margins_[a.pair] - a.sign * w;
      s.add(a.sign > 0 ? -phi_.derivative(arg) : phi_.left_derivative(arg));
    }
    return s.value();
  }
  /// sum_active phi(-m) - phi(-m - s w): the decrease of the pair sum.
  [[nodiscard]] double decrease(double w) const {
    CompensatedSum s;
    for (const auto& a : active_) {
      const double m = margins_[a.pair];
      s.add(phi_.value(-m) - phi_.value(-m - a.sign * w));
    }
    return s.value();
  }

  /// Minimizer over [-cap, cap].
  [[nodiscard]] double minimize(double cap) const {
    const double dr = right_derivative(0.0);
    const double dl = left_derivative(0.0);
    if (dr >= 0.0 && dl <= 0.0) return 0.0;
    const double dir = dr < 0.0 ? 1.0 : -1.0;
    // Slope along the descent direction at t >= 0 (right derivative in t).
    auto slope = [&](double t) { return dir > 0 ? right_derivative(t) : -left_derivative(-t); };
    double hi = std::min(10.0, cap);
    for (int k = 0; k < 10 && hi < cap && slope(hi) < 0.0; ++k) hi = std::min(2.0 * hi, cap);
    if (slope(hi) < 0.0) return dir * hi;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (slope(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return decrease(dir * lo) >= decrease(dir * hi) ? dir * lo : dir * hi;
  }

 private:
  const std::vector<ActivePair>& active_;
  const std::vector<double>& margins_;
  const CostFunction& phi_;
};

}  // namespace

// ---------------------------------------------------------------------------

ErmResult erm_finite(std::span<const RankingRule> rules, const Dataset& data) {
  if (rules.empty()) throw InvalidArgument("erm_finite: empty rule class");
  data.require_pairs("erm_finite");
  ErmResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const double r = empirical_risk(rules[k], data);
    if (r < best.risk) best = {k, r};
  }
  return best;
}

StumpGrid StumpGrid::from_data(const Dataset& data) {
  StumpGrid g;
  g.thresholds.resize(data.dim());
  for (std::size_t d = 0; d < data.dim(); ++d) {
    std::vector<double> v;
    v.reserve(data.size());
    for (const auto& s : data) v.push_back(s.x[d]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.empty()) continue;
    g.thresholds[d].push_back(v.front() - 1.0);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) g.thresholds[d].push_back(0.5 * (v[k] + v[k + 1]));
  }
  return g;
}

StumpGrid StumpGrid::uniform(double lo, double hi, std::size_t cells) {
  if (cells == 0 || !(hi > lo)) throw InvalidArgument("StumpGrid::uniform: need cells >= 1 and hi > lo");
  StumpGrid g;
  g.thresholds.resize(1);
  for (std::size_t k = 0; k <= cells; ++k) {
    g.thresholds[0].push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells));
  }
  return g;
}

std::size_t StumpGrid::size() const {
  std::size_t s = 0;
  for (const auto& t : thresholds) s += t.size();
  return s;
}

void StumpGrid::normalize() {
  for (auto& t : thresholds) {
    for (double v : t) {
      if (!std::isfinite(v)) throw InvalidArgument("StumpGrid: non-finite threshold");
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
}

StumpFit erm_stumps(const Dataset& data, const StumpGrid& grid_in) {
  require_grid(data, grid_in);
  StumpGrid grid = grid_in;
  grid.normalize();
  const std::size_t n = data.size();

  // Label ranks.
  std::vector<double> ys = data.labels();
  std::vector<double> levels = ys;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), ys[i]) - levels.begin());
  }
  const std::size_t levels_n = levels.size();

  StumpFit best;
  bool have = false;
  std::int64_t best_mistakes = 0;
  for (std::size_t d = 0; d < grid.thresholds.size(); ++d) {
    const auto& ts = grid.thresholds[d];
    if (ts.empty()) continue;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data[a].x[d] < data[b].x[d]; });

    Fenwick low_tree(levels_n);
    Fenwick high_tree(levels_n);
    std::vector<std::int64_t> low_count(levels_n, 0);
    std::vector<std::int64_t> high_count(levels_n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      high_tree.add(rank[i], 1);
      ++high_count[rank[i]];
    }
    std::int64_t low_size = 0;
    auto high_size = static_cast<std::int64_t>(n);
    std::int64_t equal_low = 0;
    std::int64_t equal_high = 0;
    for (auto c : high_count) equal_high += choose2(c);
    std::int64_t cross_equal = 0;  // sum_c low_c * high_c
    std::int64_t discordant = 0;   // (i low, j high) with y_i > y_j

    std::size_t next = 0;
    for (std::size_t t = 0; t < ts.size(); ++t) {
      while (next < n && data[order[next]].x[d] < ts[t]) {
        const std::size_t p = order[next++];
        const std::size_t c = rank[p];
        discordant -= low_size - low_tree.prefix(c + 1);
        high_tree.add(c, -1);
        discordant += high_tree.prefix(c);
        cross_equal += high_count[c] - low_count[c] - 1;
        equal_high -= high_count[c] - 1;
        equal_low += low_count[c];
        --high_count[c];
        ++low_count[c];
        low_tree.add(c, 1);
        ++low_size;
        --high_size;
      }
      const std::int64_t same_side = (choose2(low_size) - equal_low) + (choose2(high_size) - equal_high);
      const std::int64_t cross_diff = low_size * high_size - cross_equal;
      const std::int64_t mistakes_up = same_side + 2 * discordant;
      const std::int64_t mistakes_down = same_side + 2 * (cross_diff - discordant);
      for (int dir : {1, -1}) {
        const std::int64_t m = dir > 0 ? mistakes_up : mistakes_down;
        if (!have || m < best_mistakes) {
          have = true;
          best_mistakes = m;
          best.stump = Stump{d, ts[t], dir};
        }
      }
    }
  }
  best.mistakes = static_cast<std::size_t>(best_mistakes);
  best.risk = static_cast<double>(best_mistakes) / (static_cast<double>(n) * static_cast<double>(n - 1));
  return best;
}

StumpFit erm_stumps_brute(const Dataset& data, const StumpGrid& grid_in) {
  require_grid(data, grid_in);
  StumpGrid grid = grid_in;
  grid.normalize();
  const std::size_t n = data.size();
  const auto labels = data.labels();
  StumpFit best;
  bool have = false;
  for (std::size_t d = 0; d < grid.thresholds.size(); ++d) {
    for (double t : grid.thresholds[d]) {
      for (int dir : {1, -1}) {
        const ScoringFunction s(Stump{d, t, dir});
        const double r = empirical_risk(scores_of(s, data), labels);
        if (!have || r < best.risk) {
          have = true;
          best.stump = Stump{d, t, dir};
          best.risk = r;
        }
      }
    }
  }
  best.mistakes = static_cast<std::size_t>(std::llround(best.risk * static_cast<double>(n) * static_cast<double>(n - 1)));
  return best;
}

// ---------------------------------------------------------------------------

double empirical_cost(const PairScorer& f, const Dataset& data, const CostFunction& phi) {
  data.require_pairs("empirical_cost");
  const std::size_t n = data.size();
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int z = label_order(data[i].y, data[j].y);
      s.add(phi.value(z == 0 ? 0.0 : -z * f(data[i].x, data[j].x)));
    }
  }
  return s.value() / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double convex_risk(const ScoringFunction& s, const SyntheticModel& model, const CostFunction& phi) {
  const PairLaw law(model);
  const std::size_t k = law.size();
  std::vector<double> scores;
  for (const auto& p : law.points()) scores.push_back(s(p));
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = law.order(a, b);
      const double f = scores[a] - scores[b];
      const double tie = std::max(0.0, 1.0 - o.plus - o.minus);
      acc.add(law.atoms()[a].prob * law.atoms()[b].prob *
              (o.plus * phi.value(-f) + o.minus * phi.value(f) + tie * phi.value(0.0)));
    }
  }
  return acc.value();
}

double optimal_convex_risk(const SyntheticModel& model, const CostFunction& phi) {
  const PairLaw law(model);
  const std::size_t k = law.size();
  std::map<double, double> cache;
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = law.order(a, b);
      const double mass = o.plus + o.minus;
      double v = std::max(0.0, 1.0 - mass);
      if (mass > 0.0) {
        const double rho = o.plus / mass;
        auto it = cache.find(rho);
        if (it == cache.end()) it = cache.emplace(rho, optimal_conditional_cost(phi, rho)).first;
        v += mass * it->second;
      }
      acc.add(law.atoms()[a].prob * law.atoms()[b].prob * v);
    }
  }
  return acc.value();
}

// ---------------------------------------------------------------------------

double BoostResult::l1_norm() const {
  const auto* e = std::get_if<EnsembleScorer>(&scorer.variant());
  return e != nullptr ? e->l1_norm() : 0.0;
}

BoostResult boost_rank(const Dataset& data, const BoostConfig& config, const CostFunction& phi) {
  data.require_pairs("boost_rank");
  if (config.rounds < 1) throw InvalidArgument("boost_rank: rounds must be >= 1");
  if (config.budget && !(*config.budget > 0.0)) throw InvalidArgument("boost_rank: budget must be > 0");
  if (config.step == StepRule::Fixed && !(config.fixed_step > 0.0)) {
    throw InvalidArgument("boost_rank: fixed step must be > 0");
  }
  StumpGrid grid = config.base;
  if (grid.thresholds.size() != data.dim()) throw InvalidArgument("boost_rank: base grid dimension mismatch");
  grid.normalize();
  std::vector<Candidate> candidates;
  for (std::size_t d = 0; d < grid.thresholds.size(); ++d) {
    for (double t : grid.thresholds[d]) candidates.push_back({d, t});
  }
  if (candidates.empty()) throw InvalidArgument("boost_rank: empty base class");

  const std::size_t n = data.size();
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  const auto pairs = cross_pairs(data);
  const double tied_pairs = denom - 2.0 * static_cast<double>(pairs.size());
  std::vector<double> margins(pairs.size(), 0.0);

  auto objective = [&]() {
    CompensatedSum s;
    for (double m : margins) s.add(2.0 * phi.value(-m));
    s.add(tied_pairs * phi.value(0.0));
    return s.value() / denom;
  };

  std::vector<std::vector<char>> fires(candidates.size(), std::vector<char>(n));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) fires[c][i] = data[i].x[candidates[c].dim] >= candidates[c].threshold ? 1 : 0;
  }
  auto active_of = [&](std::size_t c, std::vector<ActivePair>& out) {
    out.clear();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int s = fires[c][pairs[p].first] - fires[c][pairs[p].second];
      if (s != 0) out.push_back({static_cast<std::uint32_t>(p), s});
    }
  };

  BoostResult result;
  result.initial_objective = objective();
  std::vector<double> weights(candidates.size(), 0.0);
  double current = result.initial_objective;
  const double budget = config.budget.value_or(std::numeric_limits<double>::infinity());
  std::vector<ActivePair> active;

  auto l1 = [&]() {
    double s = 0.0;
    for (double w : weights) s += std::abs(w);
    return s;
  };
  auto apply = [&](std::size_t c, double w) {
    active_of(c, active);
    for (const auto& a : active) margins[a.pair] += a.sign * w;
    weights[c] += w;
  };

  for (std::size_t round = 1; round <= config.rounds; ++round) {
    const double remaining = std::max(0.0, budget - l1());
    const double cap = config.policy == BudgetPolicy::Clip ? remaining : std::numeric_limits<double>::infinity();
    if (config.policy == BudgetPolicy::Clip && remaining <= 0.0) {
      result.stopped_early = true;
      result.stop_reason = "budget exhausted";
      break;
    }

    std::size_t best_c = candidates.size();
    double best_w = 0.0;
    double best_gain = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      active_of(c, active);
      if (active.empty()) continue;
      const LineProblem line(active, margins, phi);
      double w = 0.0;
      if (config.step == StepRule::LineSearch) {
        w = line.minimize(std::min(cap, 10.0 * 1024.0));
      } else {
        const double dr = line.right_derivative(0.0);
        const double dl = line.left_derivative(0.0);
        if (dr < 0.0) {
          w = std::min(config.fixed_step, cap);
        } else if (dl > 0.0) {
          w = -std::min(config.fixed_step, cap);
        }
        for (int k = 0; k < 60 && w != 0.0 && line.decrease(w) <= 0.0; ++k) w *= 0.5;
      }
      if (w == 0.0) continue;
      const double gain = line.decrease(w);
      if (gain > best_gain) {
        best_gain = gain;
        best_c = c;
        best_w = w;
      }
    }
    if (best_c == candidates.size()) {
      result.stopped_early = true;
      result.stop_reason = "no descent direction";
      break;
    }
    if (config.policy == BudgetPolicy::Stop && std::abs(best_w) > remaining) {
      result.stopped_early = true;
      result.stop_reason = "budget reached";
      break;
    }

    const auto saved_margins = margins;
    const auto saved_weights = weights;
    apply(best_c, best_w);
    if (config.policy == BudgetPolicy::Rescale && l1() > budget) {
      const double scale = budget / l1();
      for (auto& w : weights) w *= scale;
      for (auto& m : margins) m *= scale;
      if (objective() > current) {
        margins = saved_margins;
        weights = saved_weights;
        best_w = std::clamp(best_w, -remaining, remaining);
        if (best_w != 0.0) apply(best_c, best_w);
      }
    }
    const double next = objective();
    if (!(next <= current)) {
      margins = saved_margins;
      weights = saved_weights;
      result.stopped_early = true;
      result.stop_reason = "no descent direction";
      break;
    }
    current = next;
    BoostRound log;
    log.round = round;
    log.objective = current;
    log.base = Stump{candidates[best_c].dim, candidates[best_c].threshold, 1};
    log.weight = best_w;
    log.l1_norm = l1();
    result.log.push_back(log);
  }

  EnsembleScorer ens;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (weights[c] == 0.0) continue;
    ens.terms.push_back(
        {weights[c], std::make_shared<const ScoringFunction>(Stump{candidates[c].dim, candidates[c].threshold, 1})});
  }
  result.scorer = ScoringFunction(std::move(ens));
  return result;
}

// ---------------------------------------------------------------------------

double median_distance(std::span<const Point> points) {
  std::vector<double> d;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) s += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      if (s > 0.0) d.push_back(std::sqrt(s));
    }
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

KernelResult kernel_rank(const Dataset& data, const KernelConfig& config, const CostFunction& phi) {
  data.require_pairs("kernel_rank");
  if (!(config.radius > 0.0)) throw InvalidArgument("kernel_rank: radius must be > 0");
  if (config.steps < 1) throw InvalidArgument("kernel_rank: steps must be >= 1");
  if (!(config.step0 > 0.0)) throw InvalidArgument("kernel_rank: step0 must be > 0");
  const std::size_t n = data.size();
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);

  std::vector<Point> anchors;
  std::vector<int> sign;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int z = label_order(data[i].y, data[j].y);
      if (z == 0) continue;
      anchors.push_back(pair_point(data[i].x, data[j].x));
      sign.push_back(z);
    }
  }
  const std::size_t m = anchors.size();
  if (m > config.max_anchors) {
    throw InvalidArgument("kernel_rank: " + std::to_string(m) + " pair anchors exceed max_anchors = " +
                          std::to_string(config.max_anchors));
  }
  const double tied = denom - static_cast<double>(m);

  KernelResult result;
  if (config.kernel) {
    result.f.kernel = *config.kernel;
  } else {
    result.bandwidth = median_distance(anchors);
    result.f.kernel = FeatureKernel(GaussianKernel{result.bandwidth});
  }
  std::vector<double> gram(m * m);
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = p; q < m; ++q) {
      const double v = result.f.kernel(anchors[p], anchors[q]);
      if (!std::isfinite(v)) throw NumericalError("kernel_rank: non-finite kernel value in the Gram matrix");
      gram[p * m + q] = v;
      gram[q * m + p] = v;
    }
  }

  std::vector<double> c(m, 0.0);
  std::vector<double> f(m, 0.0);
  auto refresh = [&]() {
    for (std::size_t p = 0; p < m; ++p) {
      CompensatedSum s;
      for (std::size_t q = 0; q < m; ++q) s.add(gram[p * m + q] * c[q]);
      f[p] = s.value();
    }
  };
  auto objective = [&]() {
    CompensatedSum s;
    for (std::size_t p = 0; p < m; ++p) s.add(phi.value(-sign[p] * f[p]));
    s.add(tied * phi.value(0.0));
    return s.value() / denom;
  };
  auto norm_sq = [&]() {
    CompensatedSum s;
    for (std::size_t p = 0; p < m; ++p) s.add(c[p] * f[p]);
    return std::max(0.0, s.value());
  };

  std::vector<double> best_c = c;
  double best_obj = objective();
  std::vector<double> weight(m);
  const double radius_sq = config.radius * config.radius;
  for (std::size_t t = 0; t < config.steps && m > 0; ++t) {
    for (std::size_t p = 0; p < m; ++p) weight[p] = -sign[p] * phi.derivative(-sign[p] * f[p]) / denom;
    const double eta = config.step0 / std::sqrt(static_cast<double>(t + 1));
    for (std::size_t q = 0; q < m; ++q) {
      CompensatedSum g;
      for (std::size_t p = 0; p < m; ++p) g.add(weight[p] * gram[p * m + q]);
      c[q] -= eta * g.value();
    }
    refresh();
    double nsq = norm_sq();
    if (nsq > radius_sq) {
      const double scale = config.radius / std::sqrt(nsq);
      for (auto& v : c) v *= scale;
      for (auto& v : f) v *= scale;
      nsq = norm_sq();
    }
    const double obj = objective();
    result.objective.push_back(obj);
    result.norm_sq.push_back(nsq);
    if (obj < best_obj) {
      best_obj = obj;
      best_c = c;
    }
  }
  if (config.keep_best) c = best_c;
  if (m > 0) refresh();
  result.final_objective = m > 0 ? objective() : 1.0;
  result.f.anchors = std::move(anchors);
  result.f.coef = std::move(c);
  return result;
}

}  // namespace urank
