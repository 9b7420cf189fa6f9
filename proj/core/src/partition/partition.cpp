#include "pbds/partition/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

RangeSet::RangeSet(std::string attribute, std::vector<Range> ranges)
    : _attribute(std::move(attribute)), _ranges(std::move(ranges)) {
  if (_ranges.empty()) fail(ErrorKind::invalid_argument, "a range set needs at least one range");
  for (const auto& r : _ranges) {
    if (!(r.lo <= r.hi)) fail(ErrorKind::invalid_argument, fmt::format("empty range [{}, {}]", r.lo, r.hi));
  }
  std::sort(_ranges.begin(), _ranges.end(), [](const Range& a, const Range& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < _ranges.size(); ++i) {
    if (!(_ranges[i - 1].hi < _ranges[i].lo)) {
      fail(ErrorKind::overlapping_ranges, fmt::format("ranges [{}, {}] and [{}, {}] overlap", _ranges[i - 1].lo,
                                                      _ranges[i - 1].hi, _ranges[i].lo, _ranges[i].hi));
    }
  }
}

bool RangeSet::covers(double v) const {
  const auto it = std::upper_bound(_ranges.begin(), _ranges.end(), v, [](double x, const Range& r) { return x < r.lo; });
  return it != _ranges.begin() && std::prev(it)->contains(v);
}

std::size_t RangeSet::index_of(double v) const {
  const auto it = std::upper_bound(_ranges.begin(), _ranges.end(), v, [](double x, const Range& r) { return x < r.lo; });
  if (it == _ranges.begin() || !std::prev(it)->contains(v)) {
    fail(ErrorKind::uncovered_value, fmt::format("value {} of '{}' lies outside every range", v, _attribute));
  }
  return static_cast<std::size_t>(std::prev(it) - _ranges.begin());
}

std::string range_set_to_json(const RangeSet& ranges) {
  detail::json rs = detail::json::array();
  for (const auto& r : ranges.ranges()) rs.push_back({r.lo, r.hi});
  return detail::json{{"attribute", ranges.attribute()}, {"ranges", rs}}.dump();
}

RangeSet range_set_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "range set");
  try {
    std::vector<Range> ranges;
    for (const auto& r : j.at("ranges")) ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    return RangeSet(j.at("attribute").get<std::string>(), std::move(ranges));
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed range set: {}", e.what()));
  }
}

std::size_t RangePartition::fragment_of_row(RowId id) const {
  const auto it = _row_fragment.find(id);
  if (it == _row_fragment.end()) fail(ErrorKind::unknown_id, fmt::format("row {} not in '{}'", id, _relation));
  return it->second;
}

namespace {

std::size_t numeric_column(const Relation& rel, const std::string& attribute) {
  const std::size_t index = rel.schema().require(attribute);
  if (!is_numeric(rel.schema().attributes()[index].type)) {
    fail(ErrorKind::type_mismatch, fmt::format("cannot range-partition text attribute '{}'", attribute));
  }
  return index;
}

/// Distinct values with their total multiplicity, ascending.
std::vector<std::pair<double, std::int64_t>> value_histogram(const Relation& rel, const std::string& attribute) {
  const std::size_t index = numeric_column(rel, attribute);
  std::map<double, std::int64_t> counts;
  for (const auto& row : rel.rows()) counts[as_double(row.values[index])] += row.multiplicity;
  return {counts.begin(), counts.end()};
}

}  // namespace

RangePartition build_range_partition(const Relation& rel, const RangeSet& ranges) {
  const std::size_t index = numeric_column(rel, ranges.attribute());
  RangePartition p(ranges);
  p._relation = rel.schema().relation_name();
  p._fragments.resize(ranges.size());
  p._sizes.assign(ranges.size(), 0);
  p._row_fragment.reserve(rel.row_count());
  for (const auto& row : rel.rows()) {
    const std::size_t f = ranges.index_of(as_double(row.values[index]));
    p._fragments[f].push_back(row.id);
    p._sizes[f] += row.multiplicity;
    p._row_fragment.emplace(row.id, static_cast<std::uint32_t>(f));
  }
  p._total = rel.size();
  return p;
}

std::size_t fragment_of(const RangeSet& ranges, const Value& value) { return ranges.index_of(as_double(value)); }

std::size_t fragment_of(const RangePartition& partition, const Value& value) {
  return fragment_of(partition.range_set(), value);
}

RangeSet equi_depth_ranges(const Relation& rel, const std::string& attribute, std::size_t k) {
  const auto histogram = value_histogram(rel, attribute);
  if (k == 0) fail(ErrorKind::invalid_argument, "fragment count must be positive");
  if (histogram.empty()) fail(ErrorKind::empty_relation, fmt::format("no values of '{}' to partition", attribute));
  if (k > histogram.size()) {
    fail(ErrorKind::invalid_argument,
         fmt::format("{} fragments requested but '{}' has only {} distinct values", k, attribute, histogram.size()));
  }
  const bool integral = rel.schema().attribute(attribute).type == DataType::integer;
  const auto total = static_cast<double>(rel.size());
  std::vector<std::size_t> starts{0};  // index of the first distinct value of each bucket
  std::int64_t cumulative = 0;
  for (std::size_t i = 0; i + 1 < histogram.size() && starts.size() < k; ++i) {
    cumulative += histogram[i].second;
    const std::size_t bucket = starts.size() - 1;
    const double target = total * static_cast<double>(bucket + 1) / static_cast<double>(k);
    const std::size_t values_left = histogram.size() - i - 1;
    const std::size_t buckets_left = k - starts.size();
    if (static_cast<double>(cumulative) >= target || values_left == buckets_left) starts.push_back(i + 1);
  }
  std::vector<Range> ranges;
  for (std::size_t b = 0; b < starts.size(); ++b) {
    const double lo = histogram[starts[b]].first;
    const bool last = b + 1 == starts.size();
    double hi = last ? histogram.back().first : histogram[starts[b + 1] - 1].first;
    if (!last && integral) hi = histogram[starts[b + 1]].first - 1;  // close the integer gap
    ranges.push_back({lo, hi});
  }
  return RangeSet(attribute, std::move(ranges));
}

RangeSet equi_width_ranges(const Relation& rel, const std::string& attribute, std::size_t k) {
  const auto histogram = value_histogram(rel, attribute);
  if (k == 0) fail(ErrorKind::invalid_argument, "fragment count must be positive");
  if (histogram.empty()) fail(ErrorKind::empty_relation, fmt::format("no values of '{}' to partition", attribute));
  const double lo = histogram.front().first;
  const double hi = histogram.back().first;
  if (lo == hi) return RangeSet(attribute, {{lo, hi}});
  const double width = (hi - lo) / static_cast<double>(k);
  // boundaries snap to observed values so every range is closed on data
  std::vector<Range> ranges;
  std::size_t next = 0;
  for (std::size_t b = 0; b < k && next < histogram.size(); ++b) {
    const double upper = b + 1 == k ? hi : lo + width * static_cast<double>(b + 1);
    const std::size_t first = next;
    while (next < histogram.size() && (histogram[next].first < upper || b + 1 == k)) ++next;
    if (next == first) continue;
    ranges.push_back({histogram[first].first, histogram[next - 1].first});
  }
  return RangeSet(attribute, std::move(ranges));
}

std::size_t distinct_count(const Relation& rel, const std::string& attribute) {
  const std::size_t index = rel.schema().require(attribute);
  std::unordered_map<Value, char, ValueHash> seen;
  for (const auto& row : rel.rows()) seen.emplace(row.values[index], 0);
  return seen.size();
}

std::size_t hash_bucket(const Value& value, std::size_t bucket_count, std::uint64_t seed) {
  if (bucket_count == 0) fail(ErrorKind::invalid_argument, "bucket count must be positive");
  std::uint64_t h = 0;
  if (const auto* s = std::get_if<std::string>(&value)) {
    h = derive_seed(seed, std::string_view(*s));
  } else {
    double d = as_double(value);
    if (d == 0.0) d = 0.0;  // fold -0.0
    h = derive_seed(seed, std::bit_cast<std::uint64_t>(d));
  }
  return static_cast<std::size_t>(h % bucket_count) + 1;
}

HashPartition build_hash_partition(const Relation& rel, const std::string& attribute, std::size_t bucket_count,
                                   std::uint64_t seed) {
  const std::size_t index = rel.schema().require(attribute);
  HashPartition p{rel.schema().relation_name(), attribute, bucket_count, seed, {}, {}};
  p.fragments.resize(bucket_count);
  p.fragment_sizes.assign(bucket_count, 0);
  for (const auto& row : rel.rows()) {
    const std::size_t h = hash_bucket(row.values[index], bucket_count, seed);
    p.fragments[h - 1].push_back(row.id);
    p.fragment_sizes[h - 1] += row.multiplicity;
  }
  return p;
}

}  // namespace pbds
