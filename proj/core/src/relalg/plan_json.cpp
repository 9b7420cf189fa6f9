#include "pbds/relalg/plan_json.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

namespace detail {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::parse, fmt::format("missing field '{}' in {}", key, j.dump()));
  return j.at(key);
}

std::string string_field(const json& j, const char* key) {
  const json& f = field(j, key);
  if (!f.is_string()) fail(ErrorKind::parse, fmt::format("field '{}' must be a string", key));
  return f.get<std::string>();
}

std::vector<std::string> strings(const json& j) {
  if (!j.is_array()) fail(ErrorKind::parse, "expected an array of attribute names");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) fail(ErrorKind::parse, "expected an attribute name");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<OrderKey> order_from_json(const json& j) {
  std::vector<OrderKey> keys;
  if (!j.is_array()) fail(ErrorKind::parse, "order must be an array");
  for (const auto& e : j) {
    if (e.is_string()) {
      keys.push_back({e.get<std::string>(), SortDirection::ascending});
      continue;
    }
    OrderKey k{string_field(e, "attr"), SortDirection::ascending};
    const std::string dir = e.value("dir", "asc");
    if (dir == "desc") {
      k.direction = SortDirection::descending;
    } else if (dir != "asc") {
      fail(ErrorKind::parse, fmt::format("unknown sort direction '{}'", dir));
    }
    keys.push_back(std::move(k));
  }
  return keys;
}

json order_to_json(const std::vector<OrderKey>& keys) {
  json a = json::array();
  for (const auto& k : keys) {
    a.push_back({{"attr", k.attribute}, {"dir", k.direction == SortDirection::ascending ? "asc" : "desc"}});
  }
  return a;
}

}  // namespace

json to_json(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::get<std::string>(value);
}

Value value_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  fail(ErrorKind::parse, fmt::format("not a value: {}", j.dump()));
}

json to_json(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::attribute: return e.name();
    case Expression::Kind::constant:
      if (std::holds_alternative<std::string>(e.value())) return {{"const", to_json(e.value())}};
      return to_json(e.value());
    case Expression::Kind::binary:
      return {{"op", std::string(1, e.op())}, {"left", to_json(e.lhs())}, {"right", to_json(e.rhs())}};
  }
  return nullptr;
}

Expression expression_from_json(const json& j) {
  if (j.is_string()) return Expression::attribute(j.get<std::string>());
  if (j.is_number()) return Expression::constant(value_from_json(j));
  if (j.is_object()) {
    if (j.contains("attr")) return Expression::attribute(string_field(j, "attr"));
    if (j.contains("const")) return Expression::constant(value_from_json(j.at("const")));
    const std::string op = string_field(j, "op");
    if (op.size() != 1) fail(ErrorKind::parse, fmt::format("unknown arithmetic operator '{}'", op));
    return Expression::binary(op[0], expression_from_json(field(j, "left")), expression_from_json(field(j, "right")));
  }
  fail(ErrorKind::parse, fmt::format("not an expression: {}", j.dump()));
}

json to_json(const Predicate& p) {
  switch (p.kind()) {
    case Predicate::Kind::literal: return p.literal_value();
    case Predicate::Kind::comparison:
      return {{"cmp", std::string(to_string(p.op()))}, {"left", to_json(p.lhs())}, {"right", to_json(p.rhs())}};
    case Predicate::Kind::negation: return {{"not", to_json(p.children().front())}};
    case Predicate::Kind::conjunction:
    case Predicate::Kind::disjunction: {
      json a = json::array();
      for (const auto& c : p.children()) a.push_back(to_json(c));
      return {{p.kind() == Predicate::Kind::conjunction ? "and" : "or", a}};
    }
  }
  return nullptr;
}

Predicate predicate_from_json(const json& j) {
  if (j.is_boolean()) return Predicate::literal(j.get<bool>());
  if (!j.is_object()) fail(ErrorKind::parse, fmt::format("not a predicate: {}", j.dump()));
  if (j.contains("cmp")) {
    return Predicate::compare(expression_from_json(field(j, "left")), parse_compare_op(string_field(j, "cmp")),
                              expression_from_json(field(j, "right")));
  }
  if (j.contains("not")) return Predicate::negate(predicate_from_json(j.at("not")));
  for (const char* key : {"and", "or"}) {
    if (!j.contains(key)) continue;
    std::vector<Predicate> children;
    for (const auto& c : j.at(key)) children.push_back(predicate_from_json(c));
    return key[0] == 'a' ? Predicate::all_of(std::move(children)) : Predicate::any_of(std::move(children));
  }
  fail(ErrorKind::parse, fmt::format("not a predicate: {}", j.dump()));
}

json to_json(const PlanNode& node) {
  json j;
  j["op"] = std::string(to_string(node.kind));
  switch (node.kind) {
    case OperatorKind::table_access: j["relation"] = node.relation; break;
    case OperatorKind::selection: j["predicate"] = to_json(node.predicate); break;
    case OperatorKind::projection: {
      json items = json::array();
      for (const auto& p : node.projections) items.push_back({{"expr", to_json(p.expression)}, {"as", p.name}});
      j["items"] = items;
      break;
    }
    case OperatorKind::join: j["on"] = {node.left_attribute, node.right_attribute}; break;
    case OperatorKind::aggregation:
    case OperatorKind::window:
      j["function"] = std::string(to_string(node.function));
      if (!node.input_attribute.empty()) j["input"] = node.input_attribute;
      j["as"] = node.output_attribute;
      j[node.kind == OperatorKind::window ? "partition_by" : "group_by"] = node.group_by;
      if (node.kind == OperatorKind::window) j["order"] = order_to_json(node.order);
      break;
    case OperatorKind::top_k:
      j["limit"] = node.limit;
      j["order"] = order_to_json(node.order);
      break;
    default: break;
  }
  if (node.is_unary()) {
    j["child"] = to_json(node.children.at(0));
  } else if (node.is_binary()) {
    j["left"] = to_json(node.children.at(0));
    j["right"] = to_json(node.children.at(1));
  }
  return j;
}

PlanNode node_from_json(const json& j) {
  PlanNode node;
  node.kind = parse_operator_kind(string_field(j, "op"));
  switch (node.kind) {
    case OperatorKind::table_access: node.relation = string_field(j, "relation"); break;
    case OperatorKind::selection: node.predicate = predicate_from_json(field(j, "predicate")); break;
    case OperatorKind::projection:
      for (const auto& item : field(j, "items")) {
        if (item.is_string()) {
          node.projections.push_back({Expression::attribute(item.get<std::string>()), item.get<std::string>()});
        } else {
          node.projections.push_back({expression_from_json(field(item, "expr")), string_field(item, "as")});
        }
      }
      break;
    case OperatorKind::join: {
      const auto on = strings(field(j, "on"));
      if (on.size() != 2) fail(ErrorKind::parse, "join 'on' needs exactly two attributes");
      node.left_attribute = on[0];
      node.right_attribute = on[1];
      break;
    }
    case OperatorKind::aggregation:
    case OperatorKind::window:
      node.function = parse_agg_function(string_field(j, "function"));
      node.input_attribute = j.value("input", "");
      node.output_attribute = string_field(j, "as");
      node.group_by = strings(j.value(node.kind == OperatorKind::window ? "partition_by" : "group_by", json::array()));
      if (node.kind == OperatorKind::window) node.order = order_from_json(j.value("order", json::array()));
      break;
    case OperatorKind::top_k:
      node.limit = field(j, "limit").get<std::int64_t>();
      node.order = order_from_json(field(j, "order"));
      break;
    default: break;
  }
  if (node.is_unary()) {
    node.children.push_back(node_from_json(field(j, "child")));
  } else if (node.is_binary()) {
    node.children.push_back(node_from_json(field(j, "left")));
    node.children.push_back(node_from_json(field(j, "right")));
  }
  return node;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed {}: {}", what, e.what()));
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, fmt::format("cannot read '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, fmt::format("cannot write '{}'", path));
  out << content;
  if (!out) fail(ErrorKind::io, fmt::format("write to '{}' failed", path));
}

}  // namespace detail

QueryPlan plan_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "query plan");
  try {
    return QueryPlan(detail::node_from_json(j));
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed query plan: {}", e.what()));
  }
}

std::string plan_to_json(const QueryPlan& plan, int indent) { return detail::to_json(plan.root()).dump(indent); }

Predicate predicate_from_json(std::string_view text) {
  return detail::predicate_from_json(detail::parse_json(text, "predicate"));
}

std::string predicate_to_json(const Predicate& predicate) { return detail::to_json(predicate).dump(); }

QueryPlan load_plan(const std::string& path) {
  try {
    return QueryPlan(detail::node_from_json(detail::read_json_file(path)));
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed query plan '{}': {}", path, e.what()));
  }
}

}  // namespace pbds
