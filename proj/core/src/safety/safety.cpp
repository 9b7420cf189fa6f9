#include "pbds/safety/safety.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/safety/dependencies.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

std::string SketchType::to_string() const {
  return fmt::format("{}({}.{})", kind == Kind::range ? "R" : "H", relation, attribute);
}

SketchTypeSet SketchTypeSet::all() {
  SketchTypeSet s;
  s._all = true;
  return s;
}

SketchTypeSet SketchTypeSet::none() { return {}; }

SketchTypeSet SketchTypeSet::of(std::set<SketchType> types) {
  SketchTypeSet s;
  s._types = std::move(types);
  return s;
}

SketchTypeSet SketchTypeSet::intersect(const SketchTypeSet& other) const {
  if (_all) return other;
  if (other._all) return *this;
  std::set<SketchType> common;
  std::set_intersection(_types.begin(), _types.end(), other._types.begin(), other._types.end(),
                        std::inserter(common, common.end()));
  return of(std::move(common));
}

bool SketchTypeSet::subset_of(const SketchTypeSet& other) const {
  if (other._all) return true;
  if (_all) return false;
  return std::includes(other._types.begin(), other._types.end(), _types.begin(), _types.end());
}

std::string SketchTypeSet::to_json() const {
  if (_all) return "\"ALL\"";
  if (_types.empty()) return "\"NONE\"";
  detail::json a = detail::json::array();
  for (const auto& t : _types) a.push_back(t.to_string());
  return a.dump();
}

namespace {

/// How an aggregate moves when rows leave a group, given a HAVING comparison that keeps it safe.
enum class Direction { none, decrease, increase };

Direction direction(AggFunction function, CompareOp op, const Bound& input) {
  const bool greater = op == CompareOp::gt || op == CompareOp::ge;
  const bool less = op == CompareOp::lt || op == CompareOp::le;
  switch (function) {
    case AggFunction::count:
    case AggFunction::max: return greater ? Direction::decrease : Direction::none;
    case AggFunction::min: return less ? Direction::increase : Direction::none;
    case AggFunction::sum:
      if (greater && input.nonnegative()) return Direction::decrease;
      if (less && input.negative()) return Direction::increase;
      return Direction::none;
    case AggFunction::avg: return Direction::none;
  }
  return Direction::none;
}

bool keeps(Direction d, CompareOp op) {
  if (d == Direction::decrease) return op == CompareOp::gt || op == CompareOp::ge;
  if (d == Direction::increase) return op == CompareOp::lt || op == CompareOp::le;
  return false;
}

bool transparent(OperatorKind kind) {
  return kind == OperatorKind::projection || kind == OperatorKind::union_all || kind == OperatorKind::cross_product;
}

using Names = std::set<std::string>;

bool mentions(const Predicate& p, const Names& names) {
  std::set<std::string> used;
  p.collect_attributes(used);
  return std::any_of(used.begin(), used.end(), [&](const std::string& n) { return names.count(n) > 0; });
}

void flatten(const Predicate& p, std::vector<const Predicate*>& atoms) {
  if (p.kind() == Predicate::Kind::conjunction) {
    for (const auto& c : p.children()) flatten(c, atoms);
  } else {
    atoms.push_back(&p);
  }
}

/// Comparison operators of atoms `tracked ◇ constant` in a conjunction; nullopt if the tracked
/// attributes occur in any other form.
std::optional<std::vector<CompareOp>> tracked_comparisons(const Predicate& p, const Names& tracked) {
  std::vector<const Predicate*> atoms;
  flatten(p, atoms);
  std::vector<CompareOp> ops;
  for (const Predicate* atom : atoms) {
    if (!mentions(*atom, tracked)) continue;
    if (atom->kind() != Predicate::Kind::comparison) return std::nullopt;
    const Expression& l = atom->lhs();
    const Expression& r = atom->rhs();
    const bool numeric_r = r.is_constant() && !std::holds_alternative<std::string>(r.value());
    const bool numeric_l = l.is_constant() && !std::holds_alternative<std::string>(l.value());
    if (l.is_attribute() && tracked.count(l.name()) && numeric_r) {
      ops.push_back(atom->op());
    } else if (r.is_attribute() && tracked.count(r.name()) && numeric_l) {
      ops.push_back(mirrored(atom->op()));
    } else {
      return std::nullopt;
    }
  }
  return ops;
}

class SafetyAnalysis {
 public:
  SafetyAnalysis(const QueryPlan& plan, const Database& db) : _plan(plan), _db(db) {}

  bool tightening_sound(OperatorId selection) {
    OperatorId from = selection;
    const auto path = ancestors(selection);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const PlanNode& a = _plan.node(*it);
      switch (a.kind) {
        case OperatorKind::top_k: return false;
        case OperatorKind::difference:
          if (a.children[1].id == from) return false;
          break;
        case OperatorKind::aggregation:
        case OperatorKind::window: {
          const auto kind = qualify(a).kind;
          if (kind != Qualification::Kind::unfiltered && kind != Qualification::Kind::selection) return false;
          break;
        }
        default: break;
      }
      from = a.id;
    }
    return true;
  }

  SketchTypeSet sprime(OperatorId id) {
    const PlanNode& node = _plan.node(id);
    switch (node.kind) {
      case OperatorKind::aggregation:
      case OperatorKind::window: return aggregate_rule(node);
      case OperatorKind::difference:
        return evaluate(node.children[1], _db).empty() ? SketchTypeSet::all() : SketchTypeSet::none();
      default: return SketchTypeSet::all();
    }
  }

 private:
  std::vector<OperatorId> ancestors(OperatorId id) const {
    if (id == _plan.root().id) return {};
    return _plan.path_to_root(id);
  }

  /// Renames tracked names when moving from child `from` to its parent; false if a tracked
  /// value is transformed in a way the rules cannot follow.
  bool lift(const PlanNode& parent, OperatorId from, Names& tracked) const {
    switch (parent.kind) {
      case OperatorKind::projection: {
        Names next;
        for (const auto& item : parent.projections) {
          if (item.expression.is_attribute()) {
            if (tracked.count(item.expression.name())) next.insert(item.name);
            continue;
          }
          std::set<std::string> used;
          item.expression.collect_attributes(used);
          for (const auto& u : used) {
            if (tracked.count(u)) return false;
          }
        }
        tracked = std::move(next);
        return true;
      }
      case OperatorKind::union_all:
      case OperatorKind::intersection:
      case OperatorKind::difference: {
        if (parent.children[1].id != from) return true;
        const Schema left = infer_schema(parent.children[0], _db);
        const Schema right = infer_schema(parent.children[1], _db);
        Names next;
        for (std::size_t i = 0; i < right.arity(); ++i) {
          if (tracked.count(right.attributes()[i].name)) next.insert(left.attributes()[i].name);
        }
        tracked = std::move(next);
        return true;
      }
      default: return true;
    }
  }

  static AggFunction function_of(const PlanNode& node) { return node.function; }

  Bound input_bound(const PlanNode& node) const {
    if (node.input_attribute.empty()) return Bound::unknown();
    return value_bound(node.children[0], node.input_attribute, _db);
  }

  /// Sketch types whose dependent attributes all sit, unmodified, in the grouping.
  std::set<SketchType> grouped_types(const PlanNode& node) const {
    const auto origins = attribute_origins(node.children[0], _db);
    std::set<BaseAttribute> bases;
    for (const auto& [_, o] : origins) bases.insert(o.depends_on.begin(), o.depends_on.end());
    const Names group(node.group_by.begin(), node.group_by.end());
    std::set<SketchType> out;
    for (const auto& base : bases) {
      bool any = false;
      bool inside = true;
      for (const auto& [name, o] : origins) {
        if (!o.depends_on.count(base)) continue;
        any = true;
        inside = inside && group.count(name) && o.copy_of == base;
      }
      if (any && inside) {
        out.insert(SketchType::range_on(base.first, base.second));
        out.insert(SketchType::hash_on(base.first, base.second));
      }
    }
    return out;
  }

  struct Qualification {
    enum class Kind { unfiltered, selection, top_k, unqualified } kind = Kind::unqualified;
    Direction direction = Direction::none;
  };

  /// Finds the ancestor that neutralizes partially sketched groups of an aggregation or window.
  Qualification qualify(const PlanNode& node) {
    const auto path = ancestors(node.id);
    if (std::all_of(path.begin(), path.end(), [&](OperatorId a) { return transparent(_plan.node(a).kind); })) {
      return {Qualification::Kind::unfiltered, Direction::none};
    }
    const Bound bound = input_bound(node);
    Names tracked{node.output_attribute};
    OperatorId from = node.id;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const PlanNode& a = _plan.node(*it);
      if (a.kind == OperatorKind::selection) {
        const auto ops = tracked_comparisons(a.predicate, tracked);
        if (!ops || ops->empty()) return {};
        const Direction d = direction(node.function, ops->front(), bound);
        if (d == Direction::none) return {};
        for (const CompareOp op : *ops) {
          if (!keeps(d, op)) return {};
        }
        if (!context_preserves(std::next(it), path.rend(), a.id, tracked, d)) return {};
        return {Qualification::Kind::selection, d};
      }
      if (a.kind == OperatorKind::top_k && node.kind == OperatorKind::aggregation) {
        if (!ordering_preserves(node, a, tracked, bound)) return {};
        const bool rest_transparent =
            std::all_of(std::next(it), path.rend(), [&](OperatorId b) { return transparent(_plan.node(b).kind); });
        if (!rest_transparent) return {};
        return {Qualification::Kind::top_k, Direction::none};
      }
      if (!transparent(a.kind) || !lift(a, from, tracked)) return {};
      from = a.id;
    }
    return {};
  }

  bool ordering_preserves(const PlanNode& node, const PlanNode& top, const Names& tracked, const Bound& bound) const {
    Names order;
    for (const auto& k : top.order) order.insert(k.attribute);
    const Names group(node.group_by.begin(), node.group_by.end());
    if (!order.empty() && order == group) return monotonicity_two(node.function, true, false, bound);
    if (top.order.size() != 1 || !tracked.count(top.order.front().attribute)) return false;
    return monotonicity_two(node.function, false, top.order.front().direction == SortDirection::descending, bound);
  }

  /// Above the qualifying selection, groups that passed it but were dropped later may reappear
  /// with shifted aggregate values; every operator up to the root must treat them as before.
  template <typename It>
  bool context_preserves(It it, It end, OperatorId from, Names tracked, Direction d) {
    for (; it != end; ++it) {
      if (tracked.empty()) return true;
      const PlanNode& a = _plan.node(*it);
      switch (a.kind) {
        case OperatorKind::projection:
        case OperatorKind::union_all:
          if (!lift(a, from, tracked)) return false;
          break;
        case OperatorKind::cross_product:
        case OperatorKind::duplicate_elim: break;
        case OperatorKind::join:
          if (tracked.count(a.left_attribute) || tracked.count(a.right_attribute)) return false;
          break;
        case OperatorKind::selection: {
          if (!mentions(a.predicate, tracked)) break;
          const auto ops = tracked_comparisons(a.predicate, tracked);
          if (!ops) return false;
          for (const CompareOp op : *ops) {
            if (!keeps(d, op)) return false;
          }
          break;
        }
        case OperatorKind::aggregation: {
          for (const auto& g : a.group_by) {
            if (tracked.count(g)) return false;
          }
          if (!tracked.count(a.input_attribute)) return true;
          return compatible_outer(a, d);
        }
        default: return false;
      }
      from = a.id;
    }
    return true;
  }

  /// An outer aggregation over shifted inner values stays safe if it moves the same way.
  bool compatible_outer(const PlanNode& outer, Direction d) {
    const Qualification q = qualify(outer);
    if (q.kind == Qualification::Kind::unfiltered) return true;
    if (q.kind != Qualification::Kind::selection) return false;
    switch (outer.function) {
      case AggFunction::count: return true;
      case AggFunction::sum: return q.direction == d;
      case AggFunction::max: return d == Direction::decrease && q.direction == d;
      case AggFunction::min: return d == Direction::increase && q.direction == d;
      case AggFunction::avg: return false;
    }
    return false;
  }

  SketchTypeSet aggregate_rule(const PlanNode& node) {
    const Qualification q = qualify(node);
    if (q.kind != Qualification::Kind::unqualified) return SketchTypeSet::all();
    return SketchTypeSet::of(grouped_types(node));
  }

  const QueryPlan& _plan;
  const Database& _db;
};

}  // namespace

bool monotonicity_one(AggFunction function, CompareOp op, const Bound& agg_input) {
  return direction(function, op, agg_input) != Direction::none;
}

bool monotonicity_two(AggFunction function, bool group_equals_order, bool descending, const Bound& agg_input) {
  if (group_equals_order) return true;
  switch (function) {
    case AggFunction::count:
    case AggFunction::max: return descending;
    case AggFunction::sum: return descending && agg_input.nonnegative();
    case AggFunction::min: return !descending;
    case AggFunction::avg: return false;
  }
  return false;
}

SketchTypeSet sprime(const QueryPlan& plan, OperatorId id, const Database& db) {
  return SafetyAnalysis(plan, db).sprime(id);
}

SketchTypeSet safe_types(const QueryPlan& plan, OperatorId table_access, const Database& db) {
  if (plan.node(table_access).kind != OperatorKind::table_access) {
    fail(ErrorKind::invalid_argument, fmt::format("operator {} is not a table access", table_access));
  }
  SafetyAnalysis analysis(plan, db);
  SketchTypeSet result = analysis.sprime(table_access);
  for (const OperatorId a : plan.path_to_root(table_access)) {
    result = result.intersect(analysis.sprime(a));
    if (result.is_none()) break;
  }
  return result;
}

bool is_safe_attribute(const QueryPlan& plan, const std::string& relation, const std::string& attribute,
                       const Database& db) {
  const auto accesses = plan.table_accesses(relation);
  if (accesses.empty()) return false;
  const SketchType type = SketchType::range_on(relation, attribute);
  return std::all_of(accesses.begin(), accesses.end(),
                     [&](OperatorId a) { return safe_types(plan, a, db).contains(type); });
}

bool is_tightening_sound(const QueryPlan& plan, OperatorId selection, const Database& db) {
  if (plan.node(selection).kind != OperatorKind::selection) {
    fail(ErrorKind::invalid_argument, fmt::format("operator {} is not a selection", selection));
  }
  return SafetyAnalysis(plan, db).tightening_sound(selection);
}

std::string safety_report_json(const QueryPlan& plan, const Database& db) {
  detail::json report = detail::json::array();
  for (const OperatorId a : plan.table_accesses()) {
    report.push_back({{"access_id", a},
                      {"relation", plan.node(a).relation},
                      {"safe", detail::json::parse(safe_types(plan, a, db).to_json())}});
  }
  return report.dump(2);
}

}  // namespace pbds
