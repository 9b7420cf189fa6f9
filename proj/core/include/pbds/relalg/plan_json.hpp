#pragma once

#include <string>
#include <string_view>

#include "pbds/relalg/plan.hpp"

namespace pbds {

/// JSON tree format for plans; see docs/query-format.md.
QueryPlan plan_from_json(std::string_view text);
std::string plan_to_json(const QueryPlan& plan, int indent = 2);

Predicate predicate_from_json(std::string_view text);
std::string predicate_to_json(const Predicate& predicate);

QueryPlan load_plan(const std::string& path);

}  // namespace pbds
