#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string_view>

#include <nlohmann/json.hpp>

#include "urank/bounds.hpp"
#include "urank/learners.hpp"
#include "urank/model.hpp"
#include "urank/roc.hpp"
#include "urank/scoring.hpp"
#include "urank/ustat.hpp"

namespace urank {

using Json = nlohmann::json;

// Variant-tagged JSON ("type" key). Readers throw InvalidArgument on schema
// violations, including unknown keys.

Json to_json(const RealFunction& f);
RealFunction real_function_from_json(const Json& j);

Json to_json(const Marginal& m);
Marginal marginal_from_json(const Json& j);

/// Also accepts the preset string "M1" and the "eta_grid" shorthand
/// {"type": "eta_grid", "lo", "hi", "atoms"}: a bipartite model on support
/// {0, ..., atoms - 1} with uniform probabilities and eta on the midpoints of
/// [lo, hi].
Json to_json(const SyntheticModel& model);
SyntheticModel model_from_json(const Json& j);

/// Callable scorers are not serializable and throw InvalidArgument.
Json to_json(const ScoringFunction& s);
ScoringFunction scorer_from_json(const Json& j);

Json to_json(const KernelExpansion& f);
KernelExpansion kernel_expansion_from_json(const Json& j);

Json to_json(const HoeffdingParts& parts);
Json to_json(const ChaosStats& stats);
Json to_json(const RocCurve& curve);
Json to_json(const TailReport& report);
Json to_json(const BoostResult& result);

void write_csv(std::ostream& out, const RocCurve& curve);
/// Columns t, empirical, bound_hoeffding, bound_bernstein, bound_dpg,
/// bound_moment; curves that do not apply are left empty.
void write_csv(std::ostream& out, const TailReport& report);
/// Columns round, objective, dim, threshold, weight, l1_norm.
void write_csv(std::ostream& out, const BoostResult& result);

/// Throws InvalidArgument if `j` is not an object or has a key outside `allowed`.
void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context);

}  // namespace urank
