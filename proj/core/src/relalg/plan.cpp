#include "pbds/relalg/plan.hpp"

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::table_access: return "table";
    case OperatorKind::selection: return "select";
    case OperatorKind::projection: return "project";
    case OperatorKind::union_all: return "union";
    case OperatorKind::intersection: return "intersect";
    case OperatorKind::difference: return "difference";
    case OperatorKind::cross_product: return "cross";
    case OperatorKind::join: return "join";
    case OperatorKind::aggregation: return "aggregate";
    case OperatorKind::duplicate_elim: return "distinct";
    case OperatorKind::window: return "window";
    case OperatorKind::top_k: return "topk";
  }
  return "table";
}

OperatorKind parse_operator_kind(std::string_view text) {
  for (int k = 0; k <= static_cast<int>(OperatorKind::top_k); ++k) {
    const auto kind = static_cast<OperatorKind>(k);
    if (to_string(kind) == text) return kind;
  }
  fail(ErrorKind::parse, fmt::format("unknown operator '{}'", text));
}

std::string_view to_string(AggFunction function) {
  switch (function) {
    case AggFunction::sum: return "SUM";
    case AggFunction::count: return "COUNT";
    case AggFunction::min: return "MIN";
    case AggFunction::max: return "MAX";
    case AggFunction::avg: return "AVG";
  }
  return "SUM";
}

AggFunction parse_agg_function(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (int f = 0; f <= static_cast<int>(AggFunction::avg); ++f) {
    const auto fn = static_cast<AggFunction>(f);
    if (to_string(fn) == upper) return fn;
  }
  fail(ErrorKind::parse, fmt::format("unknown aggregation function '{}'", text));
}

bool PlanNode::is_unary() const {
  switch (kind) {
    case OperatorKind::selection:
    case OperatorKind::projection:
    case OperatorKind::aggregation:
    case OperatorKind::duplicate_elim:
    case OperatorKind::window:
    case OperatorKind::top_k: return true;
    default: return false;
  }
}

bool PlanNode::is_binary() const {
  switch (kind) {
    case OperatorKind::union_all:
    case OperatorKind::intersection:
    case OperatorKind::difference:
    case OperatorKind::cross_product:
    case OperatorKind::join: return true;
    default: return false;
  }
}

namespace {

void check_shape(const PlanNode& node) {
  const std::size_t expected = node.kind == OperatorKind::table_access ? 0 : node.is_unary() ? 1 : 2;
  if (node.children.size() != expected) {
    fail(ErrorKind::invalid_plan, fmt::format("operator '{}' expects {} children, got {}", to_string(node.kind),
                                              expected, node.children.size()));
  }
  for (const auto& c : node.children) check_shape(c);
}

void number(PlanNode& node, OperatorId& next) {
  node.id = next++;
  for (auto& c : node.children) number(c, next);
}

void collect(const PlanNode& node, OperatorId parent, std::vector<const PlanNode*>& nodes,
             std::vector<OperatorId>& parents) {
  nodes.push_back(&node);
  parents.push_back(parent);
  for (const auto& c : node.children) collect(c, node.id, nodes, parents);
}

void render(const PlanNode& node, int depth, std::string& out) {
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  out += fmt::format("[{}] {}", node.id, to_string(node.kind));
  switch (node.kind) {
    case OperatorKind::table_access: out += " " + node.relation; break;
    case OperatorKind::selection: out += " " + node.predicate.to_string(); break;
    case OperatorKind::projection:
      for (std::size_t i = 0; i < node.projections.size(); ++i) {
        out += (i ? ", " : " ") + node.projections[i].expression.to_string() + " AS " + node.projections[i].name;
      }
      break;
    case OperatorKind::join: out += fmt::format(" {} = {}", node.left_attribute, node.right_attribute); break;
    case OperatorKind::aggregation:
    case OperatorKind::window:
      out += fmt::format(" {}({}) AS {} BY [{}]", to_string(node.function),
                         node.input_attribute.empty() ? "*" : node.input_attribute, node.output_attribute,
                         fmt::join(node.group_by, ", "));
      break;
    case OperatorKind::top_k: out += fmt::format(" {}", node.limit); break;
    default: break;
  }
  for (const auto& k : node.order) {
    out += fmt::format(" {}{}", k.attribute, k.direction == SortDirection::ascending ? "^" : "v");
  }
  out += "\n";
  for (const auto& c : node.children) render(c, depth + 1, out);
}

}  // namespace

QueryPlan::QueryPlan(PlanNode root) : _root(std::move(root)) {
  check_shape(_root);
  OperatorId next = 1;
  number(_root, next);
  index();
}

QueryPlan::QueryPlan(const QueryPlan& other) : _root(other._root) { index(); }

QueryPlan& QueryPlan::operator=(const QueryPlan& other) {
  if (this != &other) {
    _root = other._root;
    index();
  }
  return *this;
}

QueryPlan::QueryPlan(QueryPlan&& other) noexcept
    : _root(std::move(other._root)), _nodes(std::move(other._nodes)), _parents(std::move(other._parents)) {
  // Child buffers move intact, so only the root entry still points into `other`.
  if (!_nodes.empty()) _nodes.front() = &_root;
  other._nodes.clear();
  other._parents.clear();
}

QueryPlan& QueryPlan::operator=(QueryPlan&& other) noexcept {
  if (this == &other) return *this;
  _root = std::move(other._root);
  _nodes = std::move(other._nodes);
  _parents = std::move(other._parents);
  if (!_nodes.empty()) _nodes.front() = &_root;
  other._nodes.clear();
  other._parents.clear();
  return *this;
}

void QueryPlan::index() {
  _nodes.clear();
  _parents.clear();
  collect(_root, 0, _nodes, _parents);
}

const PlanNode& QueryPlan::node(OperatorId id) const {
  if (id < 1 || static_cast<std::size_t>(id) > _nodes.size()) {
    fail(ErrorKind::unknown_id, fmt::format("no operator with id {}", id));
  }
  return *_nodes[static_cast<std::size_t>(id - 1)];
}

std::optional<OperatorId> QueryPlan::parent(OperatorId id) const {
  node(id);
  const OperatorId p = _parents[static_cast<std::size_t>(id - 1)];
  if (p == 0) return std::nullopt;
  return p;
}

std::vector<OperatorId> QueryPlan::path_to_root(OperatorId id) const {
  node(id);
  if (id == _root.id) return {id};
  std::vector<OperatorId> path;
  for (auto p = parent(id); p; p = parent(*p)) path.insert(path.begin(), *p);
  return path;
}

std::vector<OperatorId> QueryPlan::table_accesses() const {
  std::vector<OperatorId> ids;
  for (const auto* n : _nodes) {
    if (n->kind == OperatorKind::table_access) ids.push_back(n->id);
  }
  return ids;
}

std::vector<OperatorId> QueryPlan::table_accesses(const std::string& relation) const {
  std::vector<OperatorId> ids;
  for (const auto* n : _nodes) {
    if (n->kind == OperatorKind::table_access && n->relation == relation) ids.push_back(n->id);
  }
  return ids;
}

std::string QueryPlan::to_string() const {
  std::string out;
  render(_root, 0, out);
  return out;
}

QueryPlan assign_ids(const QueryPlan& plan) { return QueryPlan(plan.root()); }

std::vector<OperatorId> path_to_root(const QueryPlan& plan, OperatorId id) { return plan.path_to_root(id); }

namespace {

Schema concat(const Schema& l, const Schema& r) {
  std::vector<Attribute> attrs = l.attributes();
  for (const auto& a : r.attributes()) {
    if (l.contains(a.name)) {
      fail(ErrorKind::invalid_plan, fmt::format("attribute '{}' appears on both sides of a product", a.name));
    }
    attrs.push_back(a);
  }
  return Schema("", std::move(attrs));
}

void require_compatible(const Schema& l, const Schema& r, OperatorKind kind) {
  bool ok = l.arity() == r.arity();
  for (std::size_t i = 0; ok && i < l.arity(); ++i) ok = l.attributes()[i].type == r.attributes()[i].type;
  if (!ok) fail(ErrorKind::type_mismatch, fmt::format("inputs of '{}' are not union compatible", to_string(kind)));
}

DataType aggregate_type(AggFunction function, const Schema& input, const std::string& attribute) {
  if (attribute.empty()) {
    if (function != AggFunction::count) fail(ErrorKind::invalid_plan, "only COUNT may omit its input attribute");
    return DataType::integer;
  }
  const DataType t = input.attribute(attribute).type;
  if (!is_numeric(t)) fail(ErrorKind::type_mismatch, fmt::format("aggregation over text attribute '{}'", attribute));
  switch (function) {
    case AggFunction::count: return DataType::integer;
    case AggFunction::avg: return DataType::real;
    default: return t;
  }
}

}  // namespace

Schema infer_schema(const PlanNode& node, const Database& db) {
  switch (node.kind) {
    case OperatorKind::table_access: return lookup(db, node.relation).schema();
    case OperatorKind::selection: {
      Schema s = infer_schema(node.children[0], db);
      node.predicate.check(s);
      return s;
    }
    case OperatorKind::projection: {
      const Schema in = infer_schema(node.children[0], db);
      std::vector<Attribute> attrs;
      for (const auto& item : node.projections) attrs.push_back({item.name, item.expression.result_type(in)});
      return Schema("", std::move(attrs));
    }
    case OperatorKind::union_all:
    case OperatorKind::intersection:
    case OperatorKind::difference: {
      const Schema l = infer_schema(node.children[0], db);
      require_compatible(l, infer_schema(node.children[1], db), node.kind);
      return l.renamed("");
    }
    case OperatorKind::cross_product:
      return concat(infer_schema(node.children[0], db), infer_schema(node.children[1], db));
    case OperatorKind::join: {
      const Schema l = infer_schema(node.children[0], db);
      const Schema r = infer_schema(node.children[1], db);
      const DataType lt = l.attribute(node.left_attribute).type;
      const DataType rt = r.attribute(node.right_attribute).type;
      if (is_numeric(lt) != is_numeric(rt)) fail(ErrorKind::type_mismatch, "join condition compares text with a number");
      return concat(l, r);
    }
    case OperatorKind::aggregation: {
      const Schema in = infer_schema(node.children[0], db);
      std::vector<Attribute> attrs;
      for (const auto& g : node.group_by) attrs.push_back(in.attribute(g));
      attrs.push_back({node.output_attribute, aggregate_type(node.function, in, node.input_attribute)});
      return Schema("", std::move(attrs));
    }
    case OperatorKind::duplicate_elim: return infer_schema(node.children[0], db);
    case OperatorKind::window: {
      const Schema in = infer_schema(node.children[0], db);
      for (const auto& g : node.group_by) in.require(g);
      for (const auto& k : node.order) in.require(k.attribute);
      std::vector<Attribute> attrs = in.attributes();
      attrs.push_back({node.output_attribute, aggregate_type(node.function, in, node.input_attribute)});
      return Schema(in.relation_name(), std::move(attrs));
    }
    case OperatorKind::top_k: {
      Schema s = infer_schema(node.children[0], db);
      for (const auto& k : node.order) s.require(k.attribute);
      if (node.limit < 0) fail(ErrorKind::invalid_plan, "negative LIMIT");
      return s;
    }
  }
  fail(ErrorKind::invalid_plan, "unknown operator");
}

namespace plan {

namespace {
PlanNode make(OperatorKind kind, std::vector<PlanNode> children) {
  PlanNode n;
  n.kind = kind;
  n.children = std::move(children);
  return n;
}
}  // namespace

PlanNode table(std::string relation) {
  PlanNode n = make(OperatorKind::table_access, {});
  n.relation = std::move(relation);
  return n;
}

PlanNode select(Predicate predicate, PlanNode child) {
  PlanNode n = make(OperatorKind::selection, {});
  n.children.push_back(std::move(child));
  n.predicate = std::move(predicate);
  return n;
}

PlanNode project(std::vector<ProjectionItem> items, PlanNode child) {
  PlanNode n = make(OperatorKind::projection, {});
  n.children.push_back(std::move(child));
  n.projections = std::move(items);
  return n;
}

PlanNode project(const std::vector<std::string>& attributes, PlanNode child) {
  std::vector<ProjectionItem> items;
  for (const auto& a : attributes) items.push_back({Expression::attribute(a), a});
  return project(std::move(items), std::move(child));
}

namespace {
PlanNode binary(OperatorKind kind, PlanNode left, PlanNode right) {
  PlanNode n = make(kind, {});
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}
}  // namespace

PlanNode union_all(PlanNode left, PlanNode right) {
  return binary(OperatorKind::union_all, std::move(left), std::move(right));
}

PlanNode intersect(PlanNode left, PlanNode right) {
  return binary(OperatorKind::intersection, std::move(left), std::move(right));
}

PlanNode difference(PlanNode left, PlanNode right) {
  return binary(OperatorKind::difference, std::move(left), std::move(right));
}

PlanNode cross(PlanNode left, PlanNode right) {
  return binary(OperatorKind::cross_product, std::move(left), std::move(right));
}

PlanNode join(std::string left_attribute, std::string right_attribute, PlanNode left, PlanNode right) {
  PlanNode n = binary(OperatorKind::join, std::move(left), std::move(right));
  n.left_attribute = std::move(left_attribute);
  n.right_attribute = std::move(right_attribute);
  return n;
}

PlanNode aggregate(AggFunction function, std::string input, std::string output, std::vector<std::string> group_by,
                   PlanNode child) {
  PlanNode n = make(OperatorKind::aggregation, {});
  n.children.push_back(std::move(child));
  n.function = function;
  n.input_attribute = std::move(input);
  n.output_attribute = std::move(output);
  n.group_by = std::move(group_by);
  return n;
}

PlanNode distinct(PlanNode child) {
  PlanNode n = make(OperatorKind::duplicate_elim, {});
  n.children.push_back(std::move(child));
  return n;
}

PlanNode window(AggFunction function, std::string input, std::string output, std::vector<std::string> partition_by,
                std::vector<OrderKey> order, PlanNode child) {
  PlanNode n = aggregate(function, std::move(input), std::move(output), std::move(partition_by), std::move(child));
  n.kind = OperatorKind::window;
  n.order = std::move(order);
  return n;
}

PlanNode top_k(std::int64_t limit, std::vector<OrderKey> order, PlanNode child) {
  PlanNode n = make(OperatorKind::top_k, {});
  n.children.push_back(std::move(child));
  n.limit = limit;
  n.order = std::move(order);
  return n;
}

}  // namespace plan

}  // namespace pbds
