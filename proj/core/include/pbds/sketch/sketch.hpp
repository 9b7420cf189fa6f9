#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/partition/partition.hpp"
#include "pbds/relalg/plan.hpp"
#include "pbds/sketch/fingerprint.hpp"

namespace pbds {

/// The ranges of a partition whose fragments hold provenance of some query.
struct Sketch {
  std::string relation;
  RangeSet ranges;
  std::vector<bool> bits;  // one per range, true = member
  std::int64_t size_rows = 0;
  Fingerprint captured_for;

  const std::string& attribute() const { return ranges.attribute(); }
  std::size_t member_count() const;
};

/// Accurate sketch: members are exactly the fragments that intersect the lineage.
Sketch capture(const QueryPlan& plan, const Database& db, const RangePartition& partition);

struct Provenance;

/// Capture from an already computed lineage.
Sketch capture(const Provenance& lineage, const RangePartition& partition, Fingerprint fingerprint = {});

/// Builds a sketch from explicit member bits; size_rows comes from the partition.
Sketch make_sketch(const RangePartition& partition, std::vector<bool> bits, Fingerprint fingerprint = {});

/// Rows of the sketched relation that fall into member ranges, ids and order preserved.
Relation instance(const Sketch& sketch, const Database& db);

/// The database with the sketched relation replaced by its instance.
Database apply_sketch(const Sketch& sketch, const Database& db);

/// Disjunction of closed intervals over coalesced runs of member ranges.
Predicate compile_filter(const Sketch& sketch);

double selectivity(const Sketch& sketch, const Database& db);

/// Members intersect the lineage and non-members do not.
bool is_accurate(const Sketch& sketch, const QueryPlan& plan, const Database& db, const RangePartition& partition);

std::string bits_to_hex(const std::vector<bool>& bits);
std::vector<bool> bits_from_hex(std::string_view hex, std::size_t count);

std::string sketch_to_json(const Sketch& sketch);
Sketch sketch_from_json(std::string_view text);

}  // namespace pbds
