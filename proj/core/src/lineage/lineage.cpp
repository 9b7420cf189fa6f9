#include "pbds/lineage/lineage.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

bool Provenance::contains(const std::string& relation, RowId id) const {
  const auto& ids = of(relation);
  return std::binary_search(ids.begin(), ids.end(), id);
}

std::size_t Provenance::row_count() const {
  std::size_t n = 0;
  for (const auto& [_, ids] : rows) n += ids.size();
  return n;
}

const std::vector<RowId>& Provenance::of(const std::string& relation) const {
  static const std::vector<RowId> none;
  const auto it = rows.find(relation);
  return it == rows.end() ? none : it->second;
}

Provenance lineage(const QueryPlan& plan, const Database& db) {
  const TracedRelation traced = evaluate_traced(plan, db);
  Provenance out;
  for (const OperatorId id : plan.table_accesses()) out.rows[plan.node(id).relation];
  for (const auto& refs : traced.lineage) {
    for (const RowRef& ref : refs) out.rows[traced.relation_names[ref.relation]].push_back(ref.row);
  }
  for (auto& [_, ids] : out.rows) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return out;
}

Database restrict(const Database& db, const Provenance& subset) {
  Database out;
  for (const auto& [name, rel] : db) {
    const auto it = subset.rows.find(name);
    if (it == subset.rows.end()) {
      out.emplace(name, rel);
      continue;
    }
    const auto& ids = it->second;
    out.emplace(name, rel.filtered([&](const Row& row) { return std::binary_search(ids.begin(), ids.end(), row.id); }));
  }
  return out;
}

bool is_sufficient(const QueryPlan& plan, const Database& db, const Provenance& subset) {
  return bag_equal(evaluate(plan, restrict(db, subset)), evaluate(plan, db));
}

std::string provenance_to_json(const Provenance& provenance) {
  detail::json j = detail::json::object();
  for (const auto& [name, ids] : provenance.rows) j[name] = ids;
  return j.dump();
}

Provenance provenance_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "provenance");
  if (!j.is_object()) fail(ErrorKind::parse, "provenance must be an object");
  Provenance p;
  for (const auto& [name, ids] : j.items()) {
    auto& v = p.rows[name];
    for (const auto& id : ids) v.push_back(id.get<RowId>());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return p;
}

}  // namespace pbds
