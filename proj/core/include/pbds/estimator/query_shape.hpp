#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/relalg/plan.hpp"

namespace pbds {

/// Aggregation-group-by-having templates, optionally over a foreign-key join and optionally nested.
enum class QueryTemplate { agh, ajgh, aagh, aajgh };

std::string_view to_string(QueryTemplate t);

struct ForeignKeyJoin {
  std::string dimension;
  std::string fact_attribute;
  std::string dimension_attribute;
};

struct AggregateLevel {
  AggFunction function = AggFunction::sum;
  std::string input;  // empty for COUNT(*)
  std::string output;
  std::vector<std::string> group_by;
  std::optional<Predicate> having;
};

struct QueryShape {
  QueryTemplate kind = QueryTemplate::agh;
  std::string fact;
  std::vector<ForeignKeyJoin> joins;
  std::optional<Predicate> where;
  AggregateLevel inner;
  std::optional<AggregateLevel> outer;

  /// Name of the denormalized input: the fact relation, then each joined dimension.
  std::string input_name() const;
};

/// Recognizes [Π] [σ] γ ([σ] γ)? over selections of a table or of a left-deep foreign-key join.
QueryShape analyze_shape(const QueryPlan& plan, const Database& db);

/// Fact rows extended with their dimension rows; row ids are fact row ids. No selection applied.
Relation denormalize(const QueryShape& shape, const Database& db);

/// The input of the inner aggregation: denormalize followed by the WHERE selection.
Relation grouped_input(const QueryShape& shape, const Relation& denormalized);

}  // namespace pbds
