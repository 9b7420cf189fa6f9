#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/relalg/evaluator.hpp"

namespace pbds {

/// Per relation, the sorted ids of the input rows needed to reproduce a query result.
/// Rows keep their input multiplicities when the database is restricted to them.
struct Provenance {
  std::map<std::string, std::vector<RowId>> rows;

  bool contains(const std::string& relation, RowId id) const;
  std::size_t row_count() const;
  /// Rows of `relation`; empty if the relation does not occur.
  const std::vector<RowId>& of(const std::string& relation) const;

  bool operator==(const Provenance&) const = default;
};

/// Lineage of the whole result; every accessed relation gets an entry, possibly empty.
Provenance lineage(const QueryPlan& plan, const Database& db);

/// Keeps only provenance rows of the relations named in `subset`; other relations stay whole.
Database restrict(const Database& db, const Provenance& subset);

bool is_sufficient(const QueryPlan& plan, const Database& db, const Provenance& subset);

std::string provenance_to_json(const Provenance& provenance);
Provenance provenance_from_json(std::string_view text);

}  // namespace pbds
