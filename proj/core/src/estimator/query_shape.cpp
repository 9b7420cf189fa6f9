#include "pbds/estimator/query_shape.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

std::string_view to_string(QueryTemplate t) {
  switch (t) {
    case QueryTemplate::agh: return "Q-AGH";
    case QueryTemplate::ajgh: return "Q-AJGH";
    case QueryTemplate::aagh: return "Q-AAGH";
    case QueryTemplate::aajgh: return "Q-AAJGH";
  }
  return "?";
}

std::string QueryShape::input_name() const {
  std::string name = fact;
  for (const auto& j : joins) name += "*" + j.dimension;
  return name;
}

namespace {

[[noreturn]] void unsupported(const std::string& why) { fail(ErrorKind::unsupported_template, why); }

bool unique_key(const Relation& rel, const std::string& attribute) {
  const std::size_t column = rel.schema().require(attribute);
  std::unordered_map<Value, int, ValueHash> seen;
  for (const auto& row : rel.rows()) {
    if (row.multiplicity != 1 || !seen.emplace(row.values[column], 0).second) return false;
  }
  return true;
}

const PlanNode& strip_selections(const PlanNode* node, std::vector<Predicate>& where) {
  while (node->kind == OperatorKind::selection) {
    where.push_back(node->predicate);
    node = &node->children[0];
  }
  return *node;
}

/// Walks a left-deep join tree; returns the fact relation.
std::string collect_base(const PlanNode& node, const Database& db, std::vector<ForeignKeyJoin>& joins,
                         std::vector<Predicate>& where) {
  const PlanNode& base = strip_selections(&node, where);
  if (base.kind == OperatorKind::table_access) return base.relation;
  if (base.kind != OperatorKind::join) unsupported(fmt::format("'{}' below the aggregation", to_string(base.kind)));
  const PlanNode& right = strip_selections(&base.children[1], where);
  const PlanNode& left = strip_selections(&base.children[0], where);
  if (right.kind == OperatorKind::table_access && unique_key(lookup(db, right.relation), base.right_attribute)) {
    const std::string fact = collect_base(left, db, joins, where);
    joins.push_back({right.relation, base.left_attribute, base.right_attribute});
    return fact;
  }
  if (left.kind == OperatorKind::table_access && unique_key(lookup(db, left.relation), base.left_attribute)) {
    const std::string fact = collect_base(right, db, joins, where);
    joins.push_back({left.relation, base.right_attribute, base.left_attribute});
    return fact;
  }
  unsupported("join is not on a dimension key");
}

AggregateLevel level_of(const PlanNode& g, std::optional<Predicate> having) {
  if (g.function == AggFunction::min || g.function == AggFunction::max) {
    unsupported(fmt::format("{} is not estimated from samples", to_string(g.function)));
  }
  return {g.function, g.input_attribute, g.output_attribute, g.group_by, std::move(having)};
}

std::optional<Predicate> conjunction(std::vector<Predicate> parts) {
  if (parts.empty()) return std::nullopt;
  if (parts.size() == 1) return parts.front();
  return Predicate::all_of(std::move(parts));
}

}  // namespace

QueryShape analyze_shape(const QueryPlan& plan, const Database& db) {
  const PlanNode* node = &plan.root();
  while (node->kind == OperatorKind::projection) node = &node->children[0];

  std::vector<Predicate> having;
  const PlanNode& top = strip_selections(node, having);
  if (top.kind != OperatorKind::aggregation) unsupported("no aggregation at the top of the plan");

  std::vector<Predicate> inner_having;
  const PlanNode& below = strip_selections(&top.children[0], inner_having);

  QueryShape shape;
  std::vector<Predicate> where;
  const PlanNode* inner = &top;
  if (below.kind == OperatorKind::aggregation) {
    shape.outer = level_of(top, conjunction(having));
    shape.inner = level_of(below, conjunction(inner_having));
    inner = &below;
    for (const auto& g : shape.outer->group_by) {
      const auto& g1 = shape.inner.group_by;
      if (std::find(g1.begin(), g1.end(), g) == g1.end()) unsupported("outer group-by is not within the inner one");
    }
  } else {
    shape.inner = level_of(top, conjunction(having));
    where = std::move(inner_having);
  }
  shape.fact = collect_base(shape.outer ? inner->children[0] : below, db, shape.joins, where);
  shape.where = conjunction(std::move(where));
  const bool joined = !shape.joins.empty();
  if (shape.outer) {
    shape.kind = joined ? QueryTemplate::aajgh : QueryTemplate::aagh;
  } else {
    shape.kind = joined ? QueryTemplate::ajgh : QueryTemplate::agh;
  }
  return shape;
}

Relation denormalize(const QueryShape& shape, const Database& db) {
  const Relation& fact = lookup(db, shape.fact);
  if (shape.joins.empty()) return fact;

  std::vector<Attribute> attributes = fact.schema().attributes();
  struct Lookup {
    std::size_t fact_column;
    std::unordered_map<Value, const Row*, ValueHash> rows;
  };
  std::vector<Lookup> lookups;
  for (const auto& j : shape.joins) {
    const Relation& dim = lookup(db, j.dimension);
    const std::size_t key = dim.schema().require(j.dimension_attribute);
    Lookup l{Schema(shape.fact, attributes).require(j.fact_attribute), {}};
    for (const auto& row : dim.rows()) {
      if (row.multiplicity != 1 || !l.rows.emplace(row.values[key], &row).second) {
        unsupported(fmt::format("'{}.{}' is not a key", j.dimension, j.dimension_attribute));
      }
    }
    attributes.insert(attributes.end(), dim.schema().attributes().begin(), dim.schema().attributes().end());
    lookups.push_back(std::move(l));
  }

  Relation out(Schema(shape.input_name(), attributes));
  out.reserve(fact.row_count());
  for (const auto& row : fact.rows()) {
    Tuple values = row.values;
    bool matched = true;
    for (const auto& l : lookups) {
      const auto it = l.rows.find(values[l.fact_column]);
      if (it == l.rows.end()) {
        matched = false;
        break;
      }
      values.insert(values.end(), it->second->values.begin(), it->second->values.end());
    }
    if (matched) out.add_row_with_id(row.id, std::move(values), row.multiplicity);
  }
  return out;
}

Relation grouped_input(const QueryShape& shape, const Relation& denormalized) {
  if (!shape.where) return denormalized;
  const BoundPredicate where(*shape.where, denormalized.schema());
  return denormalized.filtered([&](const Row& row) { return where.evaluate(row.values); });
}

}  // namespace pbds
