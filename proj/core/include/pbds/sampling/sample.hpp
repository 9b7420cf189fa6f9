#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/relalg/relation.hpp"

namespace pbds {

/// One group of the stratification with the sampled row ids. A row of multiplicity m counts as
/// m units, so an id can occur more than once.
struct Stratum {
  Tuple key;
  std::int64_t size = 0;
  std::vector<RowId> rows;

  std::int64_t sample_size() const { return static_cast<std::int64_t>(rows.size()); }
};

struct StratifiedSample {
  std::string relation;
  std::vector<std::string> attributes;  // sorted; empty for a plain sample
  double theta = 0;
  std::uint64_t seed = 0;
  /// More groups than theta * |R|; every stratum still keeps one row.
  bool over_budget = false;
  std::vector<Stratum> strata;  // sorted by key

  /// nullptr if no stratum has this key (key in `attributes` order).
  const Stratum* find(const Tuple& key) const;
  std::size_t sample_size() const;
};

struct SamplingOptions {
  /// Use one whole-table reservoir when the groups exceed the budget.
  bool plain_fallback = false;
};

/// Per group, a uniform reservoir sample of max(1, round(theta * #g)) units.
StratifiedSample stratified_sample(const Relation& rel, std::vector<std::string> group_attributes, double theta,
                                   std::uint64_t seed, SamplingOptions options = {});

/// Group key of a row in the (sorted) attribute order of a sample.
Tuple group_key(const Relation& rel, const Row& row, const std::vector<std::string>& attributes);

/// Mean and variance of the resample means of a balanced bootstrap.
struct BootstrapResult {
  double mean = 0;
  double variance = 0;
  int resamples = 0;
};

inline constexpr int default_bootstrap = 50;

/// Balanced bootstrap: B copies of the values are shuffled together and cut into B resamples of
/// the original size, so every value is drawn exactly B times overall.
BootstrapResult bootstrap_mean(const std::vector<double>& values, int resamples, std::uint64_t seed);

/// Bootstrap statistics of one numeric attribute, parallel to sample.strata.
struct GroupStat {
  std::string attribute;
  int resamples = 0;
  std::vector<BootstrapResult> strata;
};

GroupStat bootstrap_stats(const StratifiedSample& sample, const Relation& rel, const std::string& attribute,
                          int resamples = default_bootstrap, std::uint64_t seed = 0);

std::string sample_to_json(const StratifiedSample& sample);
StratifiedSample sample_from_json(std::string_view text);

}  // namespace pbds
