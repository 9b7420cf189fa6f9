#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pbds/estimator/estimator.hpp"
#include "pbds/partition/partition.hpp"
#include "pbds/sampling/sample_cache.hpp"

namespace pbds {

struct SizeEstimate {
  std::string attribute;
  std::vector<bool> satisfied_ranges;
  std::int64_t size = 0;
  double selectivity = 0;
  /// Diagnostic from the groups' pass probabilities; never mixed into `size`.
  double expected_size = 0;
  double lower = 0;
  double upper = 0;
  double alpha = 0;
};

/// Ranges holding a row of a satisfied group. `grouped_input` rows carry the partitioned
/// relation's row ids; keys follow the sorted `group_attributes`.
SizeEstimate estimate_size(const Relation& grouped_input, const RangePartition& partition,
                           const std::vector<Tuple>& satisfied, std::vector<std::string> group_attributes,
                           const GroupProbabilities* probabilities = nullptr);

std::string size_estimate_to_json(const SizeEstimate& estimate, std::optional<std::int64_t> actual = std::nullopt);

struct EstimatorConfig {
  std::size_t fragment_count = default_fragment_count;
  double theta = 0.05;
  int bootstrap = default_bootstrap;
  double alpha = 0.95;
  std::uint64_t seed = 0;
};

/// Equi-depth partitions by (relation, attribute, fragment count).
class PartitionCache {
 public:
  std::shared_ptr<const RangePartition> get(const Relation& rel, const std::string& attribute,
                                            std::size_t fragment_count);
  /// Registers an explicit partition under its own fragment count; `get` returns it afterwards.
  void insert(std::shared_ptr<const RangePartition> partition);

 private:
  std::mutex _mutex;
  std::map<std::string, std::shared_ptr<const RangePartition>> _partitions;
};

/// Estimates sketch sizes of candidate attributes for supported queries, sharing samples and
/// partitions across calls.
class SizeEstimator {
 public:
  SizeEstimator(const Database& db, EstimatorConfig config, SampleCache& samples, PartitionCache& partitions);

  struct Result {
    QueryShape shape;
    std::shared_ptr<const StratifiedSample> sample;
    bool sample_reused = false;
    QueryEstimate groups;
    std::vector<SizeEstimate> estimates;  // in attribute order
  };

  Result estimate(const QueryPlan& plan, const std::vector<std::string>& attributes) const;

  const EstimatorConfig& config() const { return _config; }

 private:
  std::shared_ptr<const Relation> input_of(const QueryShape& shape) const;

  const Database& _db;
  EstimatorConfig _config;
  SampleCache& _samples;
  PartitionCache& _partitions;
  mutable std::mutex _mutex;
  mutable std::map<std::string, std::shared_ptr<const Relation>> _inputs;
};

}  // namespace pbds
