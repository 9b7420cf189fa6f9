#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pbds/relalg/expression.hpp"

namespace pbds {

enum class CompareOp { lt, le, eq, ge, gt };

std::string_view to_string(CompareOp op);
CompareOp parse_compare_op(std::string_view text);
/// The operator obtained by swapping the operands (a < b  <=>  b > a).
CompareOp mirrored(CompareOp op);
bool holds(CompareOp op, int three_way);

/// Boolean condition tree: comparisons joined by AND / OR / NOT, plus the literals true/false.
class Predicate {
 public:
  enum class Kind { literal, comparison, conjunction, disjunction, negation };

  Predicate() = default;  // literal true
  static Predicate literal(bool value);
  static Predicate compare(Expression lhs, CompareOp op, Expression rhs);
  static Predicate all_of(std::vector<Predicate> children);
  static Predicate any_of(std::vector<Predicate> children);
  static Predicate negate(Predicate child);

  Kind kind() const { return _kind; }
  bool literal_value() const { return _literal; }
  CompareOp op() const { return _op; }
  const Expression& lhs() const { return _operands->first; }
  const Expression& rhs() const { return _operands->second; }
  const std::vector<Predicate>& children() const { return _children; }

  /// Throws unknown_attribute / type_mismatch if the predicate does not fit the schema.
  void check(const Schema& schema) const;
  void collect_attributes(std::set<std::string>& out) const;
  std::string to_string() const;

  bool operator==(const Predicate& other) const;

 private:
  Kind _kind = Kind::literal;
  bool _literal = true;
  CompareOp _op = CompareOp::eq;
  std::shared_ptr<const std::pair<Expression, Expression>> _operands;
  std::vector<Predicate> _children;
};

Predicate compare(const std::string& attribute, CompareOp op, Value constant);
Predicate operator&&(Predicate lhs, Predicate rhs);
Predicate operator||(Predicate lhs, Predicate rhs);
Predicate operator!(Predicate p);

class BoundPredicate {
 public:
  BoundPredicate(const Predicate& predicate, const Schema& schema);

  bool evaluate(const Tuple& tuple) const;

 private:
  Predicate::Kind _kind;
  bool _literal = true;
  CompareOp _op = CompareOp::eq;
  std::shared_ptr<BoundExpression> _lhs;
  std::shared_ptr<BoundExpression> _rhs;
  std::vector<BoundPredicate> _children;
};

}  // namespace pbds
