#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/estimator/query_shape.hpp"
#include "pbds/relalg/plan.hpp"

namespace pbds {

/// Parameters of a generated workload. HAVING thresholds are quantiles of the true aggregate
/// values, drawn from [quantile_lo, quantile_hi], so the data is needed to instantiate queries.
struct WorkloadSpec {
  QueryTemplate kind = QueryTemplate::agh;
  std::string fact = "crimes";
  std::optional<ForeignKeyJoin> join;  // join templates
  std::vector<std::string> group_by;   // pool of group-by attributes
  std::size_t max_group_arity = 2;
  std::vector<std::string> aggregation_inputs;
  std::vector<AggFunction> functions{AggFunction::sum, AggFunction::avg, AggFunction::count};
  std::size_t query_count = 0;
  /// Queries draw from this many fixed (group-by, function, input) choices; 0 draws each anew.
  std::size_t distinct_templates = 0;
  double quantile_lo = 0.8;
  double quantile_hi = 0.99;
  /// Optional WHERE where_attribute >= c with c uniform in [where_lo, where_hi].
  std::string where_attribute;
  double where_probability = 0;
  std::int64_t where_lo = 0;
  std::int64_t where_hi = 0;
  std::uint64_t seed = 0;
};

WorkloadSpec workload_spec_from_json(std::string_view text);
std::string workload_spec_to_json(const WorkloadSpec& spec);

/// Deterministic in (spec, data). Throws invalid_argument for template/schema mismatches.
std::vector<QueryPlan> generate_workload(const WorkloadSpec& spec, const Database& db);

}  // namespace pbds
