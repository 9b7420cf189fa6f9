#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbds/relalg/predicate.hpp"
#include "pbds/relalg/relation.hpp"

namespace pbds {

enum class OperatorKind {
  table_access,
  selection,
  projection,
  union_all,
  intersection,
  difference,
  cross_product,
  join,
  aggregation,
  duplicate_elim,
  window,
  top_k,
};

enum class AggFunction { sum, count, min, max, avg };
enum class SortDirection { ascending, descending };

std::string_view to_string(OperatorKind kind);
OperatorKind parse_operator_kind(std::string_view text);
std::string_view to_string(AggFunction function);
AggFunction parse_agg_function(std::string_view text);

struct OrderKey {
  std::string attribute;
  SortDirection direction = SortDirection::ascending;

  bool operator==(const OrderKey&) const = default;
};

struct ProjectionItem {
  Expression expression;
  std::string name;

  bool operator==(const ProjectionItem&) const = default;
};

using OperatorId = int;

/// One operator of a query plan. Only the fields relevant to `kind` are meaningful.
struct PlanNode {
  OperatorKind kind = OperatorKind::table_access;
  OperatorId id = 0;

  std::string relation;                      // table_access
  Predicate predicate;                       // selection
  std::vector<ProjectionItem> projections;   // projection
  std::string left_attribute;                // join: left.a = right.b
  std::string right_attribute;
  AggFunction function = AggFunction::sum;   // aggregation, window
  std::string input_attribute;               // empty means COUNT(*)
  std::string output_attribute;
  std::vector<std::string> group_by;         // aggregation, window partition
  std::vector<OrderKey> order;               // window, top_k
  std::int64_t limit = 0;                    // top_k

  std::vector<PlanNode> children;

  bool is_unary() const;
  bool is_binary() const;
};

/// A query plan whose operator ids are always the pre-order positions 1..node_count.
class QueryPlan {
 public:
  explicit QueryPlan(PlanNode root);
  QueryPlan(const QueryPlan& other);
  QueryPlan& operator=(const QueryPlan& other);
  QueryPlan(QueryPlan&&) noexcept;
  QueryPlan& operator=(QueryPlan&&) noexcept;
  ~QueryPlan() = default;

  const PlanNode& root() const { return _root; }
  std::size_t node_count() const { return _nodes.size(); }
  const PlanNode& node(OperatorId id) const;
  std::optional<OperatorId> parent(OperatorId id) const;
  /// Ancestor ids in root-to-node order; for the root itself, just the root.
  std::vector<OperatorId> path_to_root(OperatorId id) const;
  std::vector<OperatorId> table_accesses() const;
  std::vector<OperatorId> table_accesses(const std::string& relation) const;

  std::string to_string() const;

 private:
  void index();

  PlanNode _root;
  std::vector<const PlanNode*> _nodes;       // by id - 1
  std::vector<OperatorId> _parents;          // by id - 1, 0 for the root
};

QueryPlan assign_ids(const QueryPlan& plan);
std::vector<OperatorId> path_to_root(const QueryPlan& plan, OperatorId id);

/// Output schema of a subtree; validates operator requirements.
Schema infer_schema(const PlanNode& node, const Database& db);

namespace plan {

PlanNode table(std::string relation);
PlanNode select(Predicate predicate, PlanNode child);
PlanNode project(std::vector<ProjectionItem> items, PlanNode child);
PlanNode project(const std::vector<std::string>& attributes, PlanNode child);
PlanNode union_all(PlanNode left, PlanNode right);
PlanNode intersect(PlanNode left, PlanNode right);
PlanNode difference(PlanNode left, PlanNode right);
PlanNode cross(PlanNode left, PlanNode right);
PlanNode join(std::string left_attribute, std::string right_attribute, PlanNode left, PlanNode right);
PlanNode aggregate(AggFunction function, std::string input, std::string output, std::vector<std::string> group_by,
                   PlanNode child);
PlanNode distinct(PlanNode child);
PlanNode window(AggFunction function, std::string input, std::string output, std::vector<std::string> partition_by,
                std::vector<OrderKey> order, PlanNode child);
PlanNode top_k(std::int64_t limit, std::vector<OrderKey> order, PlanNode child);

}  // namespace plan

}  // namespace pbds
