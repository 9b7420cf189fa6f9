#pragma once

#include <memory>
#include <set>
#include <string>

#include "pbds/relalg/schema.hpp"

namespace pbds {

/// Scalar expression over one tuple: attribute reference, constant, or +, -, * of two expressions.
class Expression {
 public:
  enum class Kind { attribute, constant, binary };

  static Expression attribute(std::string name);
  static Expression constant(Value value);
  static Expression binary(char op, Expression lhs, Expression rhs);

  Kind kind() const { return _kind; }
  const std::string& name() const { return _name; }
  const Value& value() const { return _value; }
  char op() const { return _op; }
  const Expression& lhs() const { return *_lhs; }
  const Expression& rhs() const { return *_rhs; }

  bool is_attribute() const { return _kind == Kind::attribute; }
  bool is_constant() const { return _kind == Kind::constant; }

  /// Result type against a schema; throws unknown_attribute / type_mismatch.
  DataType result_type(const Schema& schema) const;
  void collect_attributes(std::set<std::string>& out) const;
  std::string to_string() const;

  bool operator==(const Expression& other) const;

 private:
  Kind _kind = Kind::constant;
  std::string _name;
  Value _value = std::int64_t{0};
  char _op = 0;
  std::shared_ptr<const Expression> _lhs;
  std::shared_ptr<const Expression> _rhs;
};

Expression operator+(Expression lhs, Expression rhs);
Expression operator-(Expression lhs, Expression rhs);
Expression operator*(Expression lhs, Expression rhs);

/// Expression with attribute references resolved to tuple positions.
class BoundExpression {
 public:
  BoundExpression(const Expression& expression, const Schema& schema);

  Value evaluate(const Tuple& tuple) const;
  DataType type() const { return _type; }

 private:
  Expression::Kind _kind;
  std::size_t _index = 0;
  Value _value;
  char _op = 0;
  DataType _type;
  std::shared_ptr<BoundExpression> _lhs;
  std::shared_ptr<BoundExpression> _rhs;
};

}  // namespace pbds
