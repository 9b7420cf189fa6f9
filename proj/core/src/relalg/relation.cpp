#include "pbds/relalg/relation.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

void Relation::check(const Tuple& values, std::int64_t multiplicity) const {
  if (values.size() != _schema.arity()) {
    fail(ErrorKind::invalid_argument,
         fmt::format("tuple of arity {} inserted into '{}' of arity {}", values.size(), _schema.relation_name(),
                     _schema.arity()));
  }
  if (multiplicity < 1) fail(ErrorKind::invalid_argument, "multiplicity must be positive");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const DataType expected = _schema.attributes()[i].type;
    const DataType actual = type_of(values[i]);
    if (expected != actual) {
      fail(ErrorKind::type_mismatch, fmt::format("attribute '{}' expects {}, got {} value {}",
                                                 _schema.attributes()[i].name, to_string(expected), to_string(actual),
                                                 to_string(values[i])));
    }
  }
}

RowId Relation::add_row(Tuple values, std::int64_t multiplicity) {
  const RowId id = _next_id;
  add_row_with_id(id, std::move(values), multiplicity);
  return id;
}

void Relation::add_row_with_id(RowId id, Tuple values, std::int64_t multiplicity) {
  check(values, multiplicity);
  if (!_rows.empty() && id < _next_id) {
    fail(ErrorKind::invalid_argument, fmt::format("row id {} is not increasing in '{}'", id, _schema.relation_name()));
  }
  _rows.push_back(Row{id, std::move(values), multiplicity});
  _size += multiplicity;
  _next_id = id + 1;
}

const Relation& lookup(const Database& db, const std::string& name) {
  const auto it = db.find(name);
  if (it == db.end()) fail(ErrorKind::unknown_relation, fmt::format("unknown relation '{}'", name));
  return it->second;
}

std::vector<std::pair<Tuple, std::int64_t>> canonical_bag(const Relation& relation) {
  std::unordered_map<Tuple, std::int64_t, TupleHash, TupleEqual> counts;
  for (const auto& row : relation.rows()) counts[row.values] += row.multiplicity;
  std::vector<std::pair<Tuple, std::int64_t>> bag(counts.begin(), counts.end());
  std::sort(bag.begin(), bag.end(), [](const auto& a, const auto& b) { return compare_tuples(a.first, b.first) < 0; });
  return bag;
}

bool bag_equal(const Relation& lhs, const Relation& rhs) {
  if (lhs.schema().arity() != rhs.schema().arity()) return false;
  for (std::size_t i = 0; i < lhs.schema().arity(); ++i) {
    if (lhs.schema().attributes()[i].type != rhs.schema().attributes()[i].type) return false;
  }
  if (lhs.size() != rhs.size()) return false;
  const auto a = canonical_bag(lhs);
  const auto b = canonical_bag(rhs);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].second != b[i].second || !TupleEqual{}(a[i].first, b[i].first)) return false;
  }
  return true;
}

std::string to_string(const Relation& relation, std::size_t max_rows) {
  std::string out = fmt::format("{}(", relation.schema().relation_name());
  const auto& attrs = relation.schema().attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i) out += (i ? ", " : "") + attrs[i].name;
  out += fmt::format(") [{} rows]\n", relation.size());
  std::size_t shown = 0;
  for (const auto& row : relation.rows()) {
    if (shown++ == max_rows) {
      out += "  ...\n";
      break;
    }
    out += fmt::format("  #{} {}^{}\n", row.id, to_string(row.values), row.multiplicity);
  }
  return out;
}

}  // namespace pbds
