#include "pbds/relalg/expression.hpp"

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

Expression Expression::attribute(std::string name) {
  Expression e;
  e._kind = Kind::attribute;
  e._name = std::move(name);
  return e;
}

Expression Expression::constant(Value value) {
  Expression e;
  e._kind = Kind::constant;
  e._value = std::move(value);
  return e;
}

Expression Expression::binary(char op, Expression lhs, Expression rhs) {
  if (op != '+' && op != '-' && op != '*') fail(ErrorKind::invalid_plan, fmt::format("unsupported operator '{}'", op));
  Expression e;
  e._kind = Kind::binary;
  e._op = op;
  e._lhs = std::make_shared<const Expression>(std::move(lhs));
  e._rhs = std::make_shared<const Expression>(std::move(rhs));
  return e;
}

Expression operator+(Expression lhs, Expression rhs) { return Expression::binary('+', std::move(lhs), std::move(rhs)); }
Expression operator-(Expression lhs, Expression rhs) { return Expression::binary('-', std::move(lhs), std::move(rhs)); }
Expression operator*(Expression lhs, Expression rhs) { return Expression::binary('*', std::move(lhs), std::move(rhs)); }

DataType Expression::result_type(const Schema& schema) const {
  switch (_kind) {
    case Kind::attribute: return schema.attribute(_name).type;
    case Kind::constant: return type_of(_value);
    case Kind::binary: {
      const DataType l = _lhs->result_type(schema);
      const DataType r = _rhs->result_type(schema);
      if (!is_numeric(l) || !is_numeric(r)) {
        fail(ErrorKind::type_mismatch, fmt::format("arithmetic on text in {}", to_string()));
      }
      return (l == DataType::integer && r == DataType::integer) ? DataType::integer : DataType::real;
    }
  }
  return DataType::text;
}

void Expression::collect_attributes(std::set<std::string>& out) const {
  if (_kind == Kind::attribute) out.insert(_name);
  if (_kind == Kind::binary) {
    _lhs->collect_attributes(out);
    _rhs->collect_attributes(out);
  }
}

std::string Expression::to_string() const {
  switch (_kind) {
    case Kind::attribute: return _name;
    case Kind::constant:
      return std::holds_alternative<std::string>(_value) ? "'" + std::get<std::string>(_value) + "'"
                                                         : pbds::to_string(_value);
    case Kind::binary: return fmt::format("({} {} {})", _lhs->to_string(), _op, _rhs->to_string());
  }
  return {};
}

bool Expression::operator==(const Expression& other) const {
  if (_kind != other._kind) return false;
  switch (_kind) {
    case Kind::attribute: return _name == other._name;
    case Kind::constant: return _value == other._value;
    case Kind::binary: return _op == other._op && *_lhs == *other._lhs && *_rhs == *other._rhs;
  }
  return false;
}

BoundExpression::BoundExpression(const Expression& expression, const Schema& schema)
    : _kind(expression.kind()), _type(expression.result_type(schema)) {
  switch (_kind) {
    case Expression::Kind::attribute: _index = schema.require(expression.name()); break;
    case Expression::Kind::constant: _value = expression.value(); break;
    case Expression::Kind::binary:
      _op = expression.op();
      _lhs = std::make_shared<BoundExpression>(expression.lhs(), schema);
      _rhs = std::make_shared<BoundExpression>(expression.rhs(), schema);
      break;
  }
}

Value BoundExpression::evaluate(const Tuple& tuple) const {
  switch (_kind) {
    case Expression::Kind::attribute: return tuple[_index];
    case Expression::Kind::constant: return _value;
    case Expression::Kind::binary: break;
  }
  const Value l = _lhs->evaluate(tuple);
  const Value r = _rhs->evaluate(tuple);
  if (_type == DataType::integer) {
    const auto a = std::get<std::int64_t>(l);
    const auto b = std::get<std::int64_t>(r);
    switch (_op) {
      case '+': return a + b;
      case '-': return a - b;
      default: return a * b;
    }
  }
  const double a = as_double(l);
  const double b = as_double(r);
  switch (_op) {
    case '+': return a + b;
    case '-': return a - b;
    default: return a * b;
  }
}

}  // namespace pbds
