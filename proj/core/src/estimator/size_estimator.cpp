#include "pbds/estimator/size_estimator.hpp"

#include <algorithm>
#include <future>
#include <set>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "pbds/estimator/expectation.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

SizeEstimate estimate_size(const Relation& grouped_input, const RangePartition& partition,
                           const std::vector<Tuple>& satisfied, std::vector<std::string> group_attributes,
                           const GroupProbabilities* probabilities) {
  std::sort(group_attributes.begin(), group_attributes.end());
  std::vector<std::size_t> columns;
  for (const auto& g : group_attributes) columns.push_back(grouped_input.schema().require(g));
  const std::set<Tuple, TupleLess> wanted(satisfied.begin(), satisfied.end());

  SizeEstimate out;
  out.attribute = partition.attribute();
  out.satisfied_ranges.assign(partition.fragment_count(), false);
  std::vector<std::set<Tuple, TupleLess>> fragment_groups(probabilities ? partition.fragment_count() : 0);
  for (const auto& row : grouped_input.rows()) {
    Tuple key;
    key.reserve(columns.size());
    for (const std::size_t c : columns) key.push_back(row.values[c]);
    const std::size_t fragment = partition.fragment_of_row(row.id);
    if (wanted.count(key)) out.satisfied_ranges[fragment] = true;
    if (probabilities) fragment_groups[fragment].insert(std::move(key));
  }
  for (std::size_t i = 0; i < out.satisfied_ranges.size(); ++i) {
    if (out.satisfied_ranges[i]) out.size += partition.fragment_sizes()[i];
  }
  if (partition.relation_size() > 0) {
    out.selectivity = static_cast<double>(out.size) / static_cast<double>(partition.relation_size());
  }
  if (probabilities) {
    std::vector<std::vector<double>> per_fragment(partition.fragment_count());
    for (std::size_t i = 0; i < fragment_groups.size(); ++i) {
      for (const auto& key : fragment_groups[i]) {
        const auto it = probabilities->find(key);
        per_fragment[i].push_back(it == probabilities->end() ? 0.0 : it->second);
      }
    }
    const ExpectationBounds e = expectation_bounds(per_fragment, partition.fragment_sizes());
    out.expected_size = e.expected;
    out.lower = e.lower;
    out.upper = e.upper;
  } else {
    out.expected_size = out.lower = out.upper = static_cast<double>(out.size);
  }
  return out;
}

std::string size_estimate_to_json(const SizeEstimate& estimate, std::optional<std::int64_t> actual) {
  detail::json j{{"attribute", estimate.attribute},
                 {"est_size", estimate.size},
                 {"est_selectivity", estimate.selectivity},
                 {"expected_size", estimate.expected_size},
                 {"bounds", {estimate.lower, estimate.upper}},
                 {"alpha", estimate.alpha}};
  if (actual && *actual > 0) {
    j["rse_if_actual_known"] =
        std::abs(static_cast<double>(estimate.size - *actual)) / static_cast<double>(*actual);
  } else {
    j["rse_if_actual_known"] = nullptr;
  }
  return j.dump();
}

std::shared_ptr<const RangePartition> PartitionCache::get(const Relation& rel, const std::string& attribute,
                                                          std::size_t fragment_count) {
  const std::string key = fmt::format("{}|{}|{}", rel.schema().relation_name(), attribute, fragment_count);
  std::lock_guard lock(_mutex);
  auto& slot = _partitions[key];
  if (!slot) {
    slot = std::make_shared<const RangePartition>(
        build_range_partition(rel, equi_depth_ranges(rel, attribute, fragment_count)));
  }
  return slot;
}

void PartitionCache::insert(std::shared_ptr<const RangePartition> partition) {
  const std::string key =
      fmt::format("{}|{}|{}", partition->relation(), partition->attribute(), partition->fragment_count());
  std::lock_guard lock(_mutex);
  _partitions.insert_or_assign(key, std::move(partition));
}

SizeEstimator::SizeEstimator(const Database& db, EstimatorConfig config, SampleCache& samples,
                             PartitionCache& partitions)
    : _db(db), _config(config), _samples(samples), _partitions(partitions) {}

std::shared_ptr<const Relation> SizeEstimator::input_of(const QueryShape& shape) const {
  std::lock_guard lock(_mutex);
  auto& slot = _inputs[shape.input_name()];
  if (!slot) slot = std::make_shared<const Relation>(denormalize(shape, _db));
  return slot;
}

SizeEstimator::Result SizeEstimator::estimate(const QueryPlan& plan, const std::vector<std::string>& attributes) const {
  Result result;
  result.shape = analyze_shape(plan, _db);
  const auto input = input_of(result.shape);
  const auto& group_by = result.shape.inner.group_by;

  result.sample = _samples.lookup(input->schema().relation_name(), group_by);
  result.sample_reused = result.sample != nullptr;
  if (!result.sample) {
    const std::string key = SampleCache::key(input->schema().relation_name(), group_by);
    result.sample = std::make_shared<const StratifiedSample>(
        stratified_sample(*input, group_by, _config.theta, derive_seed(_config.seed, key)));
    _samples.insert(result.sample);
  }

  result.groups = estimate_query(result.shape, *result.sample, *input, {_config.bootstrap, _config.seed});
  const Relation grouped = grouped_input(result.shape, *input);
  const Relation& fact = lookup(_db, result.shape.fact);

  std::vector<std::shared_ptr<const RangePartition>> partitions;
  for (const auto& a : attributes) partitions.push_back(_partitions.get(fact, a, _config.fragment_count));

  std::vector<std::future<SizeEstimate>> pending;
  for (const auto& p : partitions) {
    pending.push_back(std::async([&, p] {
      SizeEstimate e = estimate_size(grouped, *p, result.groups.satisfied, group_by, &result.groups.probabilities);
      e.alpha = _config.alpha;
      return e;
    }));
  }
  for (auto& f : pending) result.estimates.push_back(f.get());
  return result;
}

}  // namespace pbds
