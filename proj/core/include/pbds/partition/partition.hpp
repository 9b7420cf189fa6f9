#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pbds/relalg/relation.hpp"

namespace pbds {

inline constexpr std::size_t default_fragment_count = 1000;

/// Closed interval [lo, hi].
struct Range {
  double lo;
  double hi;

  bool contains(double v) const { return lo <= v && v <= hi; }
  bool operator==(const Range&) const = default;
};

/// Sorted, pairwise disjoint closed ranges over one numeric attribute.
class RangeSet {
 public:
  /// Sorts the ranges; throws overlapping_ranges or invalid_argument.
  RangeSet(std::string attribute, std::vector<Range> ranges);

  const std::string& attribute() const { return _attribute; }
  const std::vector<Range>& ranges() const { return _ranges; }
  std::size_t size() const { return _ranges.size(); }
  const Range& operator[](std::size_t i) const { return _ranges[i]; }

  /// Index of the range containing v; throws uncovered_value.
  std::size_t index_of(double v) const;
  bool covers(double v) const;

  bool operator==(const RangeSet&) const = default;

 private:
  std::string _attribute;
  std::vector<Range> _ranges;
};

std::string range_set_to_json(const RangeSet& ranges);
RangeSet range_set_from_json(std::string_view text);

/// A relation split into fragments by a RangeSet on one attribute.
class RangePartition {
 public:
  const std::string& relation() const { return _relation; }
  const RangeSet& range_set() const { return _ranges; }
  const std::string& attribute() const { return _ranges.attribute(); }
  std::size_t fragment_count() const { return _ranges.size(); }
  const std::vector<std::vector<RowId>>& fragments() const { return _fragments; }
  const std::vector<std::int64_t>& fragment_sizes() const { return _sizes; }
  std::int64_t relation_size() const { return _total; }

  /// Fragment holding the given row; throws unknown_id for rows not in the partitioned relation.
  std::size_t fragment_of_row(RowId id) const;

 private:
  friend RangePartition build_range_partition(const Relation& rel, const RangeSet& ranges);
  explicit RangePartition(RangeSet ranges) : _ranges(std::move(ranges)) {}

  std::string _relation;
  RangeSet _ranges;
  std::vector<std::vector<RowId>> _fragments;
  std::vector<std::int64_t> _sizes;
  std::unordered_map<RowId, std::uint32_t> _row_fragment;
  std::int64_t _total = 0;
};

RangePartition build_range_partition(const Relation& rel, const RangeSet& ranges);

std::size_t fragment_of(const RangePartition& partition, const Value& value);
std::size_t fragment_of(const RangeSet& ranges, const Value& value);

/// k ranges with near-equal row counts; boundaries fall between adjacent distinct values.
RangeSet equi_depth_ranges(const Relation& rel, const std::string& attribute, std::size_t k);
/// k ranges of equal width over [min, max] of the attribute.
RangeSet equi_width_ranges(const Relation& rel, const std::string& attribute, std::size_t k);

std::size_t distinct_count(const Relation& rel, const std::string& attribute);

/// Seeded hash bucket h(v) in [1, n].
std::size_t hash_bucket(const Value& value, std::size_t bucket_count, std::uint64_t seed);

struct HashPartition {
  std::string relation;
  std::string attribute;
  std::size_t bucket_count;
  std::uint64_t seed;
  std::vector<std::vector<RowId>> fragments;  // fragments[h - 1]
  std::vector<std::int64_t> fragment_sizes;
};

HashPartition build_hash_partition(const Relation& rel, const std::string& attribute, std::size_t bucket_count,
                                   std::uint64_t seed);

}  // namespace pbds
