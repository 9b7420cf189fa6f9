#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbds/estimator/size_estimator.hpp"
#include "pbds/strategy/strategy.hpp"

namespace pbds {

struct ReplayConfig {
  StrategyKind strategy = StrategyKind::cb_opt_gb;
  EstimatorConfig estimator;
  /// Compare every sketched result with the full result and check lineage containment on reuse.
  bool verify = true;
};

struct QueryRecord {
  std::size_t index = 0;
  std::string relation;
  std::int64_t relation_rows = 0;
  std::string attribute;  // empty when the query ran without a sketch
  bool reused = false;
  bool sketched = false;
  std::string flag;  // why the query ran unsketched
  std::int64_t estimated_size = -1;
  std::int64_t actual_size = -1;
  std::optional<double> rse;
  /// Rows read: the sketch instance on reuse, the whole relation on capture or without a sketch.
  std::int64_t rows_scanned = 0;
  std::int64_t cumulative_rows = 0;
  /// Rows read to build a new sample; reported apart from rows_scanned.
  std::int64_t sample_rows = 0;
  bool result_equal = true;
  bool contained = true;
  double seconds = 0;
};

struct RunReport {
  std::string strategy;
  std::vector<QueryRecord> queries;

  /// Every verified query matched the full result and every reuse passed containment.
  bool correct() const;
};

/// Replays the workload in order against one sketch index: reuse when possible, otherwise choose
/// an attribute with the strategy, capture, and index the sketch.
RunReport run_end_to_end(const std::vector<QueryPlan>& workload, const Database& db, const ReplayConfig& config);

/// Per query, the estimated ranking of all candidates next to their true sketch sizes.
struct RankingRecord {
  std::size_t index = 0;
  std::int64_t relation_rows = 0;
  std::vector<SizeEstimate> ranking;
  std::map<std::string, std::int64_t> actual;
  RankedQuery ranked;
  /// Sketch size over relation size of what each strategy would pick (mean over the pool for RAND_*).
  std::map<std::string, double> relative_size;
};

std::vector<RankingRecord> evaluate_ranking(const std::vector<QueryPlan>& workload, const Database& db,
                                            const EstimatorConfig& config);

}  // namespace pbds
