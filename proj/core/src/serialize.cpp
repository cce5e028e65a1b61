#include "urank/serialize.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <type_traits>

#include "urank/dataset_io.hpp"
#include "urank/errors.hpp"
#include "overloaded.hpp"

namespace urank {
namespace {

using detail::Overloaded;

std::string type_of(const Json& j, std::string_view context) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw InvalidArgument(std::string(context) + ": expected an object with a string 'type'");
  }
  return j.at("type").get<std::string>();
}

template <class T>
T field(const Json& j, const char* key, std::string_view context) {
  if (!j.contains(key)) throw InvalidArgument(std::string(context) + ": missing key '" + key + "'");
  const Json& v = j.at(key);
  const auto wrong = [&]() { return InvalidArgument(std::string(context) + ": key '" + key + "' has the wrong type"); };
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!v.is_number_integer()) throw wrong();
    if (std::is_unsigned_v<T> && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw wrong();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw wrong();
  }
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw wrong();
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback, std::string_view context) {
  return j.contains(key) ? field<T>(j, key, context) : fallback;
}

Json points_json(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(p);
  return a;
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!j.is_object()) throw InvalidArgument(std::string(context) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto k : allowed) ok = ok || item.key() == k;
    if (!ok) throw InvalidArgument(std::string(context) + ": unknown key '" + item.key() + "'");
  }
}

// ---------------------------------------------------------------------------

Json to_json(const RealFunction& f) {
  return std::visit(Overloaded{
                        [](const LinearFn& g) -> Json { return {{"type", "linear"}, {"w", g.w}, {"b", g.b}}; },
                        [](const StepFn& g) -> Json {
                          return {{"type", "step"},   {"dim", g.dim},   {"threshold", g.threshold},
                                  {"low", g.low},     {"high", g.high}};
                        },
                        [](const ConstantFn& g) -> Json { return {{"type", "constant"}, {"value", g.value}}; },
                        [](const TableFn& g) -> Json {
                          return {{"type", "table"}, {"points", points_json(g.points)}, {"values", g.values}};
                        },
                        [](const CustomFn& g) -> Json {
                          throw InvalidArgument("function '" + g.name + "' is not serializable");
                        },
                    },
                    f.variant());
}

RealFunction real_function_from_json(const Json& j) {
  constexpr std::string_view ctx = "function";
  const auto type = type_of(j, ctx);
  if (type == "linear") {
    require_keys(j, {"type", "w", "b"}, ctx);
    return RealFunction(LinearFn{field<std::vector<double>>(j, "w", ctx), field_or<double>(j, "b", 0.0, ctx)});
  }
  if (type == "step") {
    require_keys(j, {"type", "dim", "threshold", "low", "high"}, ctx);
    return RealFunction(StepFn{field_or<std::size_t>(j, "dim", 0, ctx), field<double>(j, "threshold", ctx),
                  field_or<double>(j, "low", 0.0, ctx), field_or<double>(j, "high", 1.0, ctx)});
  }
  if (type == "constant") {
    require_keys(j, {"type", "value"}, ctx);
    return RealFunction(ConstantFn{field<double>(j, "value", ctx)});
  }
  if (type == "table") {
    require_keys(j, {"type", "points", "values"}, ctx);
    return RealFunction(TableFn{field<std::vector<Point>>(j, "points", ctx), field<std::vector<double>>(j, "values", ctx)});
  }
  throw InvalidArgument("function: unknown type '" + type + "'");
}

Json to_json(const Marginal& m) {
  return std::visit(Overloaded{
                        [](const FiniteMarginal& f) -> Json {
                          return {{"type", "finite"}, {"points", points_json(f.points)}, {"probs", f.probs}};
                        },
                        [](const UniformBox& b) -> Json { return {{"type", "uniform"}, {"lo", b.lo}, {"hi", b.hi}}; },
                    },
                    m);
}

Marginal marginal_from_json(const Json& j) {
  constexpr std::string_view ctx = "marginal";
  const auto type = type_of(j, ctx);
  if (type == "finite") {
    require_keys(j, {"type", "points", "probs"}, ctx);
    return FiniteMarginal{field<std::vector<Point>>(j, "points", ctx), field<std::vector<double>>(j, "probs", ctx)};
  }
  if (type == "grid") {
    require_keys(j, {"type", "lo", "hi", "size"}, ctx);
    const auto size = field<std::size_t>(j, "size", ctx);
    const auto lo = field<double>(j, "lo", ctx);
    const auto hi = field<double>(j, "hi", ctx);
    if (size == 0 || !(hi > lo)) throw InvalidArgument("marginal grid: needs size >= 1 and hi > lo");
    return uniform_grid(lo, hi, size);
  }
  if (type == "uniform") {
    require_keys(j, {"type", "lo", "hi"}, ctx);
    return UniformBox{field<std::vector<double>>(j, "lo", ctx), field<std::vector<double>>(j, "hi", ctx)};
  }
  throw InvalidArgument("marginal: unknown type '" + type + "'");
}

Json to_json(const SyntheticModel& model) {
  return std::visit(Overloaded{
                        [](const DiscreteBipartite& b) -> Json {
                          return {{"type", "bipartite"},
                                  {"points", points_json(b.marginal.points)},
                                  {"probs", b.marginal.probs},
                                  {"eta", b.eta}};
                        },
                        [](const NoiselessRegression& r) -> Json {
                          return {{"type", "noiseless"}, {"marginal", to_json(r.marginal)}, {"m", to_json(r.m)}};
                        },
                        [](const NoisyRegression& r) -> Json {
                          return {{"type", "noisy"},
                                  {"marginal", to_json(r.marginal)},
                                  {"m", to_json(r.m)},
                                  {"sigma", to_json(r.sigma)}};
                        },
                    },
                    model.variant());
}

SyntheticModel model_from_json(const Json& j) {
  constexpr std::string_view ctx = "model";
  if (j.is_string()) {
    if (j.get<std::string>() == "M1") return model_m1();
    throw InvalidArgument("model: unknown preset '" + j.get<std::string>() + "'");
  }
  const auto type = type_of(j, ctx);
  if (type == "bipartite") {
    require_keys(j, {"type", "points", "probs", "eta"}, ctx);
    return SyntheticModel(DiscreteBipartite{
        FiniteMarginal{field<std::vector<Point>>(j, "points", ctx), field<std::vector<double>>(j, "probs", ctx)},
        field<std::vector<double>>(j, "eta", ctx)});
  }
  if (type == "eta_grid") {
    require_keys(j, {"type", "lo", "hi", "atoms"}, ctx);
    const auto atoms = field<std::size_t>(j, "atoms", ctx);
    const auto lo = field<double>(j, "lo", ctx);
    const auto hi = field<double>(j, "hi", ctx);
    if (atoms == 0 || !(hi >= lo) || lo < 0.0 || hi > 1.0) {
      throw InvalidArgument("model eta_grid: needs atoms >= 1 and 0 <= lo <= hi <= 1");
    }
    const auto mids = uniform_grid(lo, hi, atoms);
    DiscreteBipartite b;
    for (std::size_t k = 0; k < atoms; ++k) {
      b.marginal.points.push_back({static_cast<double>(k)});
      b.eta.push_back(mids.points[k][0]);
    }
    b.marginal.probs = mids.probs;
    return SyntheticModel(std::move(b));
  }
  if (type == "noiseless") {
    require_keys(j, {"type", "marginal", "m"}, ctx);
    return SyntheticModel(NoiselessRegression{marginal_from_json(j.at("marginal")), real_function_from_json(j.at("m"))});
  }
  if (type == "noisy") {
    require_keys(j, {"type", "marginal", "m", "sigma"}, ctx);
    if (!j.contains("marginal") || !j.contains("m") || !j.contains("sigma")) {
      throw InvalidArgument("model noisy: needs marginal, m and sigma");
    }
    return SyntheticModel(NoisyRegression{marginal_from_json(j.at("marginal")), real_function_from_json(j.at("m")),
                                          real_function_from_json(j.at("sigma"))});
  }
  throw InvalidArgument("model: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------

Json to_json(const ScoringFunction& s) {
  return std::visit(Overloaded{
                        [](const Stump& st) -> Json {
                          return {{"type", "stump"},
                                  {"dim", st.dim},
                                  {"threshold", st.threshold},
                                  {"direction", st.direction}};
                        },
                        [](const LinearScorer& l) -> Json { return {{"type", "linear"}, {"w", l.w}}; },
                        [](const TableScorer& t) -> Json {
                          Json pts = Json::array();
                          Json vals = Json::array();
                          for (const auto& [p, v] : t.scores) {
                            pts.push_back(p);
                            vals.push_back(v);
                          }
                          return {{"type", "table"}, {"points", pts}, {"scores", vals}};
                        },
                        [](const EnsembleScorer& e) -> Json {
                          Json terms = Json::array();
                          for (const auto& term : e.terms) {
                            terms.push_back({{"weight", term.weight}, {"base", to_json(*term.base)}});
                          }
                          return {{"type", "ensemble"}, {"terms", terms}};
                        },
                        [](const CallableScorer& c) -> Json {
                          throw InvalidArgument("scorer '" + c.name + "' is not serializable");
                        },
                    },
                    s.variant());
}

ScoringFunction scorer_from_json(const Json& j) {
  constexpr std::string_view ctx = "scorer";
  const auto type = type_of(j, ctx);
  if (type == "stump") {
    require_keys(j, {"type", "dim", "threshold", "direction"}, ctx);
    const int dir = field_or<int>(j, "direction", 1, ctx);
    if (dir != 1 && dir != -1) throw InvalidArgument("scorer stump: direction must be +1 or -1");
    return ScoringFunction(Stump{field_or<std::size_t>(j, "dim", 0, ctx), field<double>(j, "threshold", ctx), dir});
  }
  if (type == "linear") {
    require_keys(j, {"type", "w"}, ctx);
    return ScoringFunction(LinearScorer{field<std::vector<double>>(j, "w", ctx)});
  }
  if (type == "table") {
    require_keys(j, {"type", "points", "scores"}, ctx);
    return ScoringFunction::table(field<std::vector<Point>>(j, "points", ctx),
                                  field<std::vector<double>>(j, "scores", ctx));
  }
  if (type == "ensemble") {
    require_keys(j, {"type", "terms"}, ctx);
    EnsembleScorer e;
    for (const auto& t : j.at("terms")) {
      require_keys(t, {"weight", "base"}, "ensemble term");
      e.terms.push_back({field<double>(t, "weight", ctx), std::make_shared<const ScoringFunction>(scorer_from_json(t.at("base")))});
    }
    return ScoringFunction(std::move(e));
  }
  throw InvalidArgument("scorer: unknown type '" + type + "'");
}

Json to_json(const KernelExpansion& f) {
  Json kernel = std::visit(Overloaded{
                               [](const GaussianKernel& g) -> Json {
                                 return {{"type", "gaussian"}, {"bandwidth", g.bandwidth}};
                               },
                               [](const CustomKernel& c) -> Json {
                                 throw InvalidArgument("kernel '" + c.name + "' is not serializable");
                               },
                           },
                           f.kernel.variant());
  return {{"type", "kernel_expansion"}, {"kernel", kernel}, {"anchors", points_json(f.anchors)}, {"coef", f.coef}};
}

KernelExpansion kernel_expansion_from_json(const Json& j) {
  constexpr std::string_view ctx = "kernel_expansion";
  if (type_of(j, ctx) != "kernel_expansion") throw InvalidArgument("kernel_expansion: wrong type tag");
  require_keys(j, {"type", "kernel", "anchors", "coef"}, ctx);
  const Json& k = j.at("kernel");
  require_keys(k, {"type", "bandwidth"}, "kernel");
  if (type_of(k, "kernel") != "gaussian") throw InvalidArgument("kernel: only 'gaussian' is supported");
  KernelExpansion f;
  f.kernel = FeatureKernel(GaussianKernel{field<double>(k, "bandwidth", "kernel")});
  f.anchors = field<std::vector<Point>>(j, "anchors", ctx);
  f.coef = field<std::vector<double>>(j, "coef", ctx);
  if (f.anchors.size() != f.coef.size()) throw InvalidArgument("kernel_expansion: anchors and coef differ in length");
  return f;
}

// ---------------------------------------------------------------------------

Json to_json(const HoeffdingParts& parts) {
  return {{"mean", parts.mean}, {"u_n", parts.u_n},           {"t_n", parts.t_n},
          {"w_n", parts.w_n},   {"h_values", parts.h_values}, {"approximate", parts.approximate}};
}

Json to_json(const ChaosStats& stats) {
  return {{"z_eps", stats.z_eps}, {"u_eps", stats.u_eps}, {"m_stat", stats.m_stat}, {"eps", stats.eps}};
}

Json to_json(const RocCurve& curve) {
  Json fpr = Json::array();
  Json tpr = Json::array();
  for (const auto& p : curve.points) {
    fpr.push_back(p.fpr);
    tpr.push_back(p.tpr);
  }
  return {{"fpr", fpr}, {"tpr", tpr}, {"area", curve.area()}};
}

Json to_json(const TailReport& r) {
  return {{"n", r.n},
          {"replicates", r.replicates},
          {"t", r.t},
          {"empirical", r.empirical},
          {"bound_hoeffding", r.bound_hoeffding},
          {"bound_bernstein", r.bound_bernstein},
          {"bound_dpg", r.bound_dpg},
          {"bound_moment", r.bound_moment},
          {"mean", r.mean},
          {"sigma2", r.sigma2},
          {"s2", r.s2},
          {"e_z_eps", r.e_z_eps},
          {"e_u_eps", r.e_u_eps},
          {"e_m", r.e_m},
          {"f_sup", r.f_sup},
          {"c", r.c}};
}

Json to_json(const BoostResult& result) {
  Json log = Json::array();
  for (const auto& r : result.log) {
    log.push_back({{"round", r.round},
                   {"objective", r.objective},
                   {"dim", r.base.dim},
                   {"threshold", r.base.threshold},
                   {"weight", r.weight},
                   {"l1_norm", r.l1_norm}});
  }
  return {{"scorer", to_json(result.scorer)},
          {"initial_objective", result.initial_objective},
          {"final_objective", result.final_objective()},
          {"l1_norm", result.l1_norm()},
          {"stopped_early", result.stopped_early},
          {"stop_reason", result.stop_reason},
          {"log", log}};
}

void write_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

void write_csv(std::ostream& out, const TailReport& r) {
  out << "t,empirical,bound_hoeffding,bound_bernstein,bound_dpg,bound_moment\n";
  auto cell = [](const std::vector<double>& v, std::size_t k) {
    return k < v.size() ? csv_number(v[k]) : std::string();
  };
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    out << format_double(r.t[k]) << ',' << cell(r.empirical, k) << ',' << cell(r.bound_hoeffding, k) << ','
        << cell(r.bound_bernstein, k) << ',' << cell(r.bound_dpg, k) << ',' << cell(r.bound_moment, k) << '\n';
  }
}

void write_csv(std::ostream& out, const BoostResult& result) {
  out << "round,objective,dim,threshold,weight,l1_norm\n";
  out << "0," << format_double(result.initial_objective) << ",,,0,0\n";
  for (const auto& r : result.log) {
    out << r.round << ',' << format_double(r.objective) << ',' << r.base.dim << ',' << format_double(r.base.threshold)
        << ',' << format_double(r.weight) << ',' << format_double(r.l1_norm) << '\n';
  }
}

}  // namespace urank
