#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pbds/relalg/plan.hpp"

namespace pbds {

/// (relation, attribute) of a base table.
using BaseAttribute = std::pair<std::string, std::string>;

/// How an output attribute was derived from base attributes.
struct AttributeOrigin {
  std::set<BaseAttribute> depends_on;
  /// Set when the attribute is an unmodified copy of one base attribute.
  std::optional<BaseAttribute> copy_of;
};

/// Origins of every attribute of the node's output, keyed by attribute name.
std::map<std::string, AttributeOrigin> attribute_origins(const PlanNode& node, const Database& db);

/// Base attributes referenced by the roles a query gives them.
struct AttributeRoles {
  std::set<BaseAttribute> group_by;
  std::set<BaseAttribute> aggregation_input;
  std::set<BaseAttribute> selection;
  std::set<BaseAttribute> join;
};

AttributeRoles attribute_roles(const QueryPlan& plan, const Database& db);

}  // namespace pbds
