#include "pbds/sketch/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/lineage/lineage.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/safety/safety.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

std::size_t Sketch::member_count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true)); }

Sketch make_sketch(const RangePartition& partition, std::vector<bool> bits, Fingerprint fingerprint) {
  if (bits.size() != partition.fragment_count()) {
    fail(ErrorKind::invalid_argument,
         fmt::format("{} member bits for {} ranges", bits.size(), partition.fragment_count()));
  }
  std::int64_t size = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) size += partition.fragment_sizes()[i];
  }
  return Sketch{partition.relation(), partition.range_set(), std::move(bits), size, std::move(fingerprint)};
}

Sketch capture(const QueryPlan& plan, const Database& db, const RangePartition& partition) {
  if (plan.table_accesses(partition.relation()).empty()) {
    fail(ErrorKind::invalid_argument, fmt::format("plan does not access '{}'", partition.relation()));
  }
  return capture(lineage(plan, db), partition, fingerprint(plan));
}

Sketch capture(const Provenance& lineage, const RangePartition& partition, Fingerprint fingerprint) {
  std::vector<bool> bits(partition.fragment_count(), false);
  for (const RowId id : lineage.of(partition.relation())) bits[partition.fragment_of_row(id)] = true;
  return make_sketch(partition, std::move(bits), std::move(fingerprint));
}

Relation instance(const Sketch& sketch, const Database& db) {
  const Relation& rel = lookup(db, sketch.relation);
  const std::size_t column = rel.schema().require(sketch.attribute());
  return rel.filtered([&](const Row& row) {
    const double v = as_double(row.values[column]);
    if (!sketch.ranges.covers(v)) return false;
    return static_cast<bool>(sketch.bits[sketch.ranges.index_of(v)]);
  });
}

Database apply_sketch(const Sketch& sketch, const Database& db) {
  Database out = db;
  out.insert_or_assign(sketch.relation, instance(sketch, db));
  return out;
}

namespace {

Value bound_constant(double v) {
  if (std::nearbyint(v) == v && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

Predicate compile_filter(const Sketch& sketch) {
  std::vector<Predicate> disjuncts;
  const auto& bits = sketch.bits;
  for (std::size_t i = 0; i < bits.size();) {
    if (!bits[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < bits.size() && bits[j + 1]) ++j;
    const double lo = sketch.ranges[i].lo;
    const double hi = sketch.ranges[j].hi;
    std::vector<Predicate> sides;
    if (std::isfinite(lo)) sides.push_back(compare(sketch.attribute(), CompareOp::ge, bound_constant(lo)));
    if (std::isfinite(hi)) sides.push_back(compare(sketch.attribute(), CompareOp::le, bound_constant(hi)));
    if (sides.empty()) return Predicate::literal(true);
    disjuncts.push_back(sides.size() == 1 ? sides.front() : Predicate::all_of(std::move(sides)));
    i = j + 1;
  }
  if (disjuncts.empty()) return Predicate::literal(false);
  if (disjuncts.size() == 1) return disjuncts.front();
  return Predicate::any_of(std::move(disjuncts));
}

double selectivity(const Sketch& sketch, const Database& db) {
  const Relation& rel = lookup(db, sketch.relation);
  if (rel.size() == 0) fail(ErrorKind::empty_relation, fmt::format("'{}' is empty", sketch.relation));
  return static_cast<double>(sketch.size_rows) / static_cast<double>(rel.size());
}

bool is_accurate(const Sketch& sketch, const QueryPlan& plan, const Database& db, const RangePartition& partition) {
  if (sketch.bits.size() != partition.fragment_count()) return false;
  const Provenance prov = lineage(plan, db);
  const auto& ids = prov.of(sketch.relation);
  std::int64_t size = 0;
  for (std::size_t i = 0; i < partition.fragment_count(); ++i) {
    const auto& fragment = partition.fragments()[i];
    const bool hit = std::any_of(fragment.begin(), fragment.end(),
                                 [&](RowId id) { return std::binary_search(ids.begin(), ids.end(), id); });
    if (hit != sketch.bits[i]) return false;
    if (hit) size += partition.fragment_sizes()[i];
  }
  return size == sketch.size_rows;
}

bool is_safe_dynamic(const QueryPlan& plan, const Database& db, const std::vector<Sketch>& sketches) {
  Database restricted = db;
  for (const auto& s : sketches) restricted.insert_or_assign(s.relation, instance(s, db));
  return bag_equal(evaluate(plan, restricted), evaluate(plan, db));
}

std::string bits_to_hex(const std::vector<bool>& bits) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out((bits.size() + 3) / 4, '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const int nibble = (out[i / 4] >= 'a') ? out[i / 4] - 'a' + 10 : out[i / 4] - '0';
    out[i / 4] = digits[nibble | (8 >> (i % 4))];
  }
  return out;
}

std::vector<bool> bits_from_hex(std::string_view hex, std::size_t count) {
  if (hex.size() != (count + 3) / 4) {
    fail(ErrorKind::parse, fmt::format("{} hex digits cannot hold {} bits", hex.size(), count));
  }
  std::vector<bool> bits(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    const char c = hex[i / 4];
    int nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      nibble = c - 'A' + 10;
    } else {
      fail(ErrorKind::parse, fmt::format("bad hex digit '{}'", c));
    }
    bits[i] = (nibble & (8 >> (i % 4))) != 0;
  }
  return bits;
}

namespace {

detail::json fingerprint_to_json(const Fingerprint& f) {
  detail::json slots = detail::json::array();
  for (const auto& s : f.slots) {
    slots.push_back({{"selection", s.selection}, {"op", to_string(s.op)}, {"value", detail::to_json(s.value)}});
  }
  return {{"text", f.text}, {"slots", slots}};
}

Fingerprint fingerprint_from_json(const detail::json& j) {
  Fingerprint f;
  f.text = j.at("text").get<std::string>();
  for (const auto& s : j.at("slots")) {
    f.slots.push_back({s.at("selection").get<OperatorId>(), parse_compare_op(s.at("op").get<std::string>()),
                       detail::value_from_json(s.at("value"))});
  }
  return f;
}

}  // namespace

std::string sketch_to_json(const Sketch& sketch) {
  detail::json ranges = detail::json::array();
  for (const auto& r : sketch.ranges.ranges()) ranges.push_back({r.lo, r.hi});
  return detail::json{{"relation", sketch.relation},
                      {"attribute", sketch.attribute()},
                      {"ranges", ranges},
                      {"bits", bits_to_hex(sketch.bits)},
                      {"size_rows", sketch.size_rows},
                      {"fingerprint", fingerprint_to_json(sketch.captured_for)}}
      .dump();
}

Sketch sketch_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "sketch");
  try {
    std::vector<Range> ranges;
    for (const auto& r : j.at("ranges")) ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    RangeSet set(j.at("attribute").get<std::string>(), std::move(ranges));
    const std::size_t n = set.size();
    Sketch s{j.at("relation").get<std::string>(), std::move(set),
             bits_from_hex(j.at("bits").get<std::string>(), n), j.at("size_rows").get<std::int64_t>(), {}};
    if (j.contains("fingerprint")) s.captured_for = fingerprint_from_json(j.at("fingerprint"));
    return s;
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed sketch: {}", e.what()));
  }
}

}  // namespace pbds
