#pragma once

#include <cstddef>
#include <vector>

#include "urank/model.hpp"
#include "urank/random.hpp"

namespace fixtures {

/// Random bipartite model on `atoms` distinct points of dimension `dim`. The
/// first coordinate is the atom index; the others come from a small integer
/// set so that ties occur.
inline urank::SyntheticModel random_bipartite(urank::Rng& rng, std::size_t atoms, std::size_t dim = 1) {
  urank::DiscreteBipartite b;
  double total = 0.0;
  for (std::size_t k = 0; k < atoms; ++k) {
    urank::Point x(dim);
    for (auto& v : x) v = static_cast<double>(rng.index(5));
    x[0] = static_cast<double>(k);
    b.marginal.points.push_back(x);
    const double w = 0.1 + rng.uniform();
    b.marginal.probs.push_back(w);
    total += w;
    b.eta.push_back(static_cast<double>(rng.index(11)) / 10.0);
  }
  for (auto& p : b.marginal.probs) p /= total;
  return urank::SyntheticModel(std::move(b));
}

/// Random noiseless regression on a finite support with a tabulated m.
inline urank::SyntheticModel random_noiseless(urank::Rng& rng, std::size_t atoms) {
  urank::FiniteMarginal marg;
  urank::TableFn m;
  double total = 0.0;
  for (std::size_t k = 0; k < atoms; ++k) {
    const urank::Point x{static_cast<double>(k)};
    marg.points.push_back(x);
    const double w = 0.1 + rng.uniform();
    marg.probs.push_back(w);
    total += w;
    m.points.push_back(x);
    m.values.push_back(static_cast<double>(rng.index(4)));
  }
  for (auto& p : marg.probs) p /= total;
  return urank::SyntheticModel(urank::NoiselessRegression{marg, m});
}

inline std::vector<double> random_vector(urank::Rng& rng, std::size_t n, std::size_t levels) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.index(levels));
  return v;
}

inline std::vector<double> random_signs(urank::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.rademacher();
  return v;
}

}  // namespace fixtures
