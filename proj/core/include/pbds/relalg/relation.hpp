#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pbds/relalg/schema.hpp"

namespace pbds {

using RowId = std::uint64_t;

/// One physical row: a tuple occurring `multiplicity` times.
struct Row {
  RowId id;
  Tuple values;
  std::int64_t multiplicity = 1;
};

/// Bag-semantics relation. Row ids are strictly increasing in insertion order, which
/// makes them unique and keeps restricted copies in the original order.
class Relation {
 public:
  explicit Relation(Schema schema) : _schema(std::move(schema)) {}

  const Schema& schema() const { return _schema; }
  const std::vector<Row>& rows() const { return _rows; }
  std::size_t row_count() const { return _rows.size(); }
  /// Bag cardinality, the sum of multiplicities.
  std::int64_t size() const { return _size; }
  bool empty() const { return _rows.empty(); }

  RowId add_row(Tuple values, std::int64_t multiplicity = 1);
  void add_row_with_id(RowId id, Tuple values, std::int64_t multiplicity = 1);
  void reserve(std::size_t n) { _rows.reserve(n); }

  /// Rows whose ids satisfy `keep`, preserving ids and order.
  template <typename Predicate>
  Relation filtered(Predicate&& keep) const {
    Relation out(_schema);
    for (const auto& row : _rows) {
      if (keep(row)) out.add_row_with_id(row.id, row.values, row.multiplicity);
    }
    return out;
  }

 private:
  void check(const Tuple& values, std::int64_t multiplicity) const;

  Schema _schema;
  std::vector<Row> _rows;
  std::int64_t _size = 0;
  RowId _next_id = 0;
};

using Database = std::map<std::string, Relation>;

const Relation& lookup(const Database& db, const std::string& name);

/// Consolidated bag: distinct tuples with summed multiplicities, sorted.
std::vector<std::pair<Tuple, std::int64_t>> canonical_bag(const Relation& relation);

/// Bag equality over tuples (row ids and relation names ignored, arity and types must agree).
bool bag_equal(const Relation& lhs, const Relation& rhs);

std::string to_string(const Relation& relation, std::size_t max_rows = 50);

}  // namespace pbds
