#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbds/estimator/query_shape.hpp"
#include "pbds/sampling/sample.hpp"

namespace pbds {

/// Estimated aggregate of one group, from its stratum.
struct GroupEstimate {
  Tuple key;  // in the sample's attribute order
  double estimate = 0;
  double variance = 0;
  /// Probability that the HAVING condition holds under a normal model of the estimate.
  double probability = 0;
  /// False for AVG over a stratum without rows passing the WHERE condition.
  bool defined = true;
  std::int64_t stratum_size = 0;
  std::int64_t sample_size = 0;
  std::int64_t qualifying = 0;
};

struct EstimationOptions {
  int bootstrap = default_bootstrap;
  std::uint64_t seed = 0;
};

using GroupProbabilities = std::map<Tuple, double, TupleLess>;

/// One estimate per stratum. `input` is the sampled relation; the sample must be stratified
/// on exactly the level's group-by attributes.
std::vector<GroupEstimate> estimate_groups(const StratifiedSample& sample, const Relation& input,
                                           const AggregateLevel& level, const std::optional<Predicate>& where,
                                           const EstimationOptions& options = {});

/// Keys whose point estimate satisfies `having` (all defined keys if there is none).
std::vector<Tuple> satisfied_groups(const std::vector<GroupEstimate>& estimates, const Schema& input_schema,
                                    const AggregateLevel& level);

/// The estimate of one group; throws missing_stratum.
const GroupEstimate& estimate_of(const std::vector<GroupEstimate>& estimates, const Tuple& key);

/// Inner groups whose rows are expected in the provenance of the whole query.
struct QueryEstimate {
  std::vector<GroupEstimate> groups;
  std::vector<Tuple> satisfied;
  GroupProbabilities probabilities;
};

/// For nested templates the outer aggregation runs exactly over the estimated inner result;
/// their pass probabilities are 0 or 1.
QueryEstimate estimate_query(const QueryShape& shape, const StratifiedSample& sample, const Relation& input,
                             const EstimationOptions& options = {});

}  // namespace pbds
