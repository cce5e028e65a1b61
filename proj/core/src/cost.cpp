#include "urank/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "urank/errors.hpp"

namespace urank {
namespace {

constexpr double kAlphaBound = 50.0;
constexpr int kGridPoints = 401;
constexpr double kTolerance = 1e-10;

void require_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("conditional cost: rho must lie in [0, 1]");
}

// Minimum over [lo, hi] of the convex map a -> rho phi(-a) + (1 - rho) phi(a).
double minimize(const CostFunction& phi, double rho, double lo, double hi) {
  auto f = [&](double a) { return rho * phi.value(-a) + (1.0 - rho) * phi.value(a); };
  const double step = (hi - lo) / (kGridPoints - 1);
  int best = 0;
  double best_val = f(lo);
  for (int k = 1; k < kGridPoints; ++k) {
    const double v = f(lo + step * k);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(kGridPoints - 1, best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kTolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({best_val, fc, fd, f(0.5 * (a + b))});
}

}  // namespace

double CostFunction::value(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      return std::exp(x);
    case Kind::Logit:
      // log2(1 + e^x), stable for large |x|.
      return (x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x))) / std::numbers::ln2;
    case Kind::Hinge:
      return std::max(0.0, 1.0 + x);
  }
  return 0.0;
}

double CostFunction::derivative(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      return std::exp(x);
    case Kind::Logit:
      return 1.0 / ((1.0 + std::exp(-x)) * std::numbers::ln2);
    case Kind::Hinge:
      return x >= -1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double CostFunction::left_derivative(double x) const {
  if (kind_ == Kind::Hinge) return x > -1.0 ? 1.0 : 0.0;
  return derivative(x);
}

const char* CostFunction::name() const {
  switch (kind_) {
    case Kind::Exponential:
      return "exponential";
    case Kind::Logit:
      return "logit";
    case Kind::Hinge:
      return "hinge";
  }
  return "?";
}

CostFunction CostFunction::parse(const std::string& name) {
  if (name == "exponential") return exponential();
  if (name == "logit") return logit();
  if (name == "hinge") return hinge();
  throw InvalidArgument("unknown cost function '" + name + "' (expected exponential, logit or hinge)");
}

double optimal_conditional_cost(const CostFunction& phi, double rho) {
  require_rho(rho);
  return minimize(phi, rho, -kAlphaBound, kAlphaBound);
}

double constrained_conditional_cost(const CostFunction& phi, double rho) {
  require_rho(rho);
  if (rho > 0.5) return minimize(phi, rho, -kAlphaBound, 0.0);
  if (rho < 0.5) return minimize(phi, rho, 0.0, kAlphaBound);
  return optimal_conditional_cost(phi, rho);
}

double psi(const CostFunction& phi, double x, PsiForm form) {
  if (!(x >= -1.0 && x <= 1.0)) throw InvalidArgument("psi: x must lie in [-1, 1]");
  const double up = (1.0 + x) / 2.0;
  if (form == PsiForm::AsDisplayed) {
    return constrained_conditional_cost(phi, up) - constrained_conditional_cost(phi, (1.0 - x) / 2.0);
  }
  return constrained_conditional_cost(phi, up) - optimal_conditional_cost(phi, up);
}

double psi_inverse(const CostFunction& phi, double u) {
  const double top = psi(phi, 1.0);
  if (!(u >= 0.0 && u <= top)) throw InvalidArgument("psi_inverse: u outside [0, psi(1)]");
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi(phi, mid) >= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return u == 0.0 ? 0.0 : hi;
}

double convex_excess_to_rank_bound(double a_excess, const CostFunction& phi) {
  if (!(a_excess >= 0.0)) throw InvalidArgument("convex_excess_to_rank_bound: excess must be >= 0");
  if (a_excess >= psi(phi, 1.0)) return 1.0;
  return std::clamp(psi_inverse(phi, a_excess), 0.0, 1.0);
}

double budget_schedule(const CostFunction& phi, std::size_t n) {
  if (n < 2) throw InvalidArgument("budget_schedule: n must be >= 2");
  const double nn = static_cast<double>(n);
  if (phi.kind() == CostFunction::Kind::Exponential) return 0.25 * std::log(nn);
  return std::pow(nn, 0.125);
}

}  // namespace urank
