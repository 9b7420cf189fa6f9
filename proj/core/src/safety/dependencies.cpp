#include "pbds/safety/dependencies.hpp"

namespace pbds {

namespace {

using Origins = std::map<std::string, AttributeOrigin>;

AttributeOrigin origin_of(const Expression& e, const Origins& input) {
  if (e.is_attribute()) return input.at(e.name());
  std::set<std::string> names;
  e.collect_attributes(names);
  AttributeOrigin o;
  for (const auto& n : names) {
    const auto& d = input.at(n).depends_on;
    o.depends_on.insert(d.begin(), d.end());
  }
  return o;
}

AttributeOrigin merge(const AttributeOrigin& a, const AttributeOrigin& b) {
  AttributeOrigin o;
  o.depends_on = a.depends_on;
  o.depends_on.insert(b.depends_on.begin(), b.depends_on.end());
  if (a.copy_of && a.copy_of == b.copy_of) o.copy_of = a.copy_of;
  return o;
}

}  // namespace

std::map<std::string, AttributeOrigin> attribute_origins(const PlanNode& node, const Database& db) {
  switch (node.kind) {
    case OperatorKind::table_access: {
      Origins out;
      for (const auto& a : lookup(db, node.relation).schema().attributes()) {
        const BaseAttribute base{node.relation, a.name};
        out[a.name] = AttributeOrigin{{base}, base};
      }
      return out;
    }
    case OperatorKind::selection:
    case OperatorKind::duplicate_elim:
    case OperatorKind::top_k: return attribute_origins(node.children[0], db);
    case OperatorKind::projection: {
      const Origins in = attribute_origins(node.children[0], db);
      Origins out;
      for (const auto& item : node.projections) out[item.name] = origin_of(item.expression, in);
      return out;
    }
    case OperatorKind::union_all:
    case OperatorKind::intersection:
    case OperatorKind::difference: {
      const Origins l = attribute_origins(node.children[0], db);
      const Origins r = attribute_origins(node.children[1], db);
      const Schema ls = infer_schema(node.children[0], db);
      const Schema rs = infer_schema(node.children[1], db);
      Origins out;
      for (std::size_t i = 0; i < ls.arity(); ++i) {
        const auto& name = ls.attributes()[i].name;
        out[name] = merge(l.at(name), r.at(rs.attributes()[i].name));
      }
      return out;
    }
    case OperatorKind::cross_product:
    case OperatorKind::join: {
      Origins out = attribute_origins(node.children[0], db);
      for (auto& [name, o] : attribute_origins(node.children[1], db)) out[name] = o;
      return out;
    }
    case OperatorKind::aggregation:
    case OperatorKind::window: {
      const Origins in = attribute_origins(node.children[0], db);
      Origins out;
      if (node.kind == OperatorKind::window) {
        out = in;
      } else {
        for (const auto& g : node.group_by) out[g] = in.at(g);
      }
      AttributeOrigin result;
      if (!node.input_attribute.empty()) result.depends_on = in.at(node.input_attribute).depends_on;
      out[node.output_attribute] = result;
      return out;
    }
  }
  return {};
}

namespace {

void insert_all(std::set<BaseAttribute>& into, const std::set<BaseAttribute>& from) {
  into.insert(from.begin(), from.end());
}

void collect_roles(const PlanNode& node, const Database& db, AttributeRoles& roles) {
  for (const auto& c : node.children) collect_roles(c, db, roles);
  switch (node.kind) {
    case OperatorKind::selection: {
      const Origins in = attribute_origins(node.children[0], db);
      std::set<std::string> names;
      node.predicate.collect_attributes(names);
      for (const auto& n : names) insert_all(roles.selection, in.at(n).depends_on);
      break;
    }
    case OperatorKind::join: {
      insert_all(roles.join, attribute_origins(node.children[0], db).at(node.left_attribute).depends_on);
      insert_all(roles.join, attribute_origins(node.children[1], db).at(node.right_attribute).depends_on);
      break;
    }
    case OperatorKind::aggregation:
    case OperatorKind::window: {
      const Origins in = attribute_origins(node.children[0], db);
      if (node.kind == OperatorKind::aggregation) {
        for (const auto& g : node.group_by) insert_all(roles.group_by, in.at(g).depends_on);
      }
      if (!node.input_attribute.empty()) insert_all(roles.aggregation_input, in.at(node.input_attribute).depends_on);
      break;
    }
    default: break;
  }
}

}  // namespace

AttributeRoles attribute_roles(const QueryPlan& plan, const Database& db) {
  AttributeRoles roles;
  collect_roles(plan.root(), db, roles);
  return roles;
}

}  // namespace pbds
