#pragma once

#include <json.hpp>

#include "pbds/relalg/plan.hpp"

namespace pbds::detail {

using json = nlohmann::json;

json to_json(const Value& value);
Value value_from_json(const json& j);
json to_json(const Expression& expression);
Expression expression_from_json(const json& j);
json to_json(const Predicate& predicate);
Predicate predicate_from_json(const json& j);
json to_json(const PlanNode& node);
PlanNode node_from_json(const json& j);

json parse_json(std::string_view text, std::string_view what);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pbds::detail
