#pragma once

#include <set>
#include <string>
#include <vector>

#include "pbds/relalg/plan.hpp"
#include "pbds/safety/bound.hpp"

namespace pbds {

struct Sketch;

/// R(A) or H(A): a range or hash partition on one attribute of one relation.
struct SketchType {
  enum class Kind { range, hash };

  Kind kind;
  std::string relation;
  std::string attribute;

  static SketchType range_on(std::string relation, std::string attribute) {
    return {Kind::range, std::move(relation), std::move(attribute)};
  }
  static SketchType hash_on(std::string relation, std::string attribute) {
    return {Kind::hash, std::move(relation), std::move(attribute)};
  }

  std::string to_string() const;
  auto operator<=>(const SketchType&) const = default;
};

/// ALL, NONE, or an explicit set of sketch types (an empty explicit set is NONE).
class SketchTypeSet {
 public:
  static SketchTypeSet all();
  static SketchTypeSet none();
  static SketchTypeSet of(std::set<SketchType> types);

  bool is_all() const { return _all; }
  bool is_none() const { return !_all && _types.empty(); }
  const std::set<SketchType>& types() const { return _types; }

  bool contains(const SketchType& type) const { return _all || _types.count(type) > 0; }
  SketchTypeSet intersect(const SketchTypeSet& other) const;
  /// Subset order: NONE ⊆ explicit ⊆ ALL.
  bool subset_of(const SketchTypeSet& other) const;

  /// "ALL", "NONE", or a JSON array of type names.
  std::string to_json() const;
  bool operator==(const SketchTypeSet&) const = default;

 private:
  bool _all = false;
  std::set<SketchType> _types;
};

bool monotonicity_one(AggFunction function, CompareOp op, const Bound& agg_input);

/// Top-k ordering condition. `group_equals_order` means the order keys are exactly the group-by
/// attributes; otherwise `descending` is the direction of the single key on the aggregate.
bool monotonicity_two(AggFunction function, bool group_equals_order, bool descending, const Bound& agg_input);

/// Per-operator safe sketch types; set difference evaluates its right input over db.
SketchTypeSet sprime(const QueryPlan& plan, OperatorId id, const Database& db);

/// Intersection of sprime over the access's path to the root and the access itself.
SketchTypeSet safe_types(const QueryPlan& plan, OperatorId table_access, const Database& db);

/// Safe for every access of the relation in the plan.
bool is_safe_attribute(const QueryPlan& plan, const std::string& relation, const std::string& attribute,
                       const Database& db);

/// True if strengthening the selection's predicate can only shrink the plan's lineage: no
/// top-k, no right side of a difference, and every aggregation or window above it is
/// neutralized by a monotone filter or unfiltered.
bool is_tightening_sound(const QueryPlan& plan, OperatorId selection, const Database& db);

/// Evaluates over the sketch instances and compares with evaluation over db.
bool is_safe_dynamic(const QueryPlan& plan, const Database& db, const std::vector<Sketch>& sketches);

/// Report for every table access: [{"access_id": .., "relation": .., "safe": ..}].
std::string safety_report_json(const QueryPlan& plan, const Database& db);

}  // namespace pbds
