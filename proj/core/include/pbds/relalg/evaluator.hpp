#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbds/relalg/plan.hpp"

namespace pbds {

/// Reference to one base row: index into TracedRelation::relation_names plus the row id.
struct RowRef {
  std::uint32_t relation;
  RowId row;

  auto operator<=>(const RowRef&) const = default;
};

/// Query result where every output row carries the base rows it was derived from.
struct TracedRelation {
  Relation relation;
  std::vector<std::string> relation_names;
  std::vector<std::vector<RowRef>> lineage;  // parallel to relation.rows()
};

/// Evaluates a plan under bag semantics. The result is consolidated: each distinct tuple appears
/// once with its multiplicity, in order of first derivation. Pure and thread-safe.
Relation evaluate(const QueryPlan& plan, const Database& db);
Relation evaluate(const PlanNode& node, const Database& db);

TracedRelation evaluate_traced(const QueryPlan& plan, const Database& db);

}  // namespace pbds
