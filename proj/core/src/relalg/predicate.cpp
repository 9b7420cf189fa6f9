#include "pbds/relalg/predicate.hpp"

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::eq: return "=";
    case CompareOp::ge: return ">=";
    case CompareOp::gt: return ">";
  }
  return "=";
}

CompareOp parse_compare_op(std::string_view text) {
  if (text == "<") return CompareOp::lt;
  if (text == "<=") return CompareOp::le;
  if (text == "=" || text == "==") return CompareOp::eq;
  if (text == ">=") return CompareOp::ge;
  if (text == ">") return CompareOp::gt;
  fail(ErrorKind::parse, fmt::format("unknown comparison '{}'", text));
}

CompareOp mirrored(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return CompareOp::gt;
    case CompareOp::le: return CompareOp::ge;
    case CompareOp::ge: return CompareOp::le;
    case CompareOp::gt: return CompareOp::lt;
    case CompareOp::eq: return CompareOp::eq;
  }
  return op;
}

bool holds(CompareOp op, int c) {
  switch (op) {
    case CompareOp::lt: return c < 0;
    case CompareOp::le: return c <= 0;
    case CompareOp::eq: return c == 0;
    case CompareOp::ge: return c >= 0;
    case CompareOp::gt: return c > 0;
  }
  return false;
}

Predicate Predicate::literal(bool value) {
  Predicate p;
  p._literal = value;
  return p;
}

Predicate Predicate::compare(Expression lhs, CompareOp op, Expression rhs) {
  Predicate p;
  p._kind = Kind::comparison;
  p._op = op;
  p._operands = std::make_shared<const std::pair<Expression, Expression>>(std::move(lhs), std::move(rhs));
  return p;
}

Predicate Predicate::all_of(std::vector<Predicate> children) {
  if (children.size() == 1) return std::move(children.front());
  Predicate p;
  p._kind = Kind::conjunction;
  p._children = std::move(children);
  return p;
}

Predicate Predicate::any_of(std::vector<Predicate> children) {
  if (children.size() == 1) return std::move(children.front());
  if (children.empty()) return literal(false);
  Predicate p;
  p._kind = Kind::disjunction;
  p._children = std::move(children);
  return p;
}

Predicate Predicate::negate(Predicate child) {
  Predicate p;
  p._kind = Kind::negation;
  p._children.push_back(std::move(child));
  return p;
}

Predicate compare(const std::string& attribute, CompareOp op, Value constant) {
  return Predicate::compare(Expression::attribute(attribute), op, Expression::constant(std::move(constant)));
}

Predicate operator&&(Predicate lhs, Predicate rhs) { return Predicate::all_of({std::move(lhs), std::move(rhs)}); }
Predicate operator||(Predicate lhs, Predicate rhs) { return Predicate::any_of({std::move(lhs), std::move(rhs)}); }
Predicate operator!(Predicate p) { return Predicate::negate(std::move(p)); }

void Predicate::check(const Schema& schema) const {
  switch (_kind) {
    case Kind::literal: return;
    case Kind::comparison: {
      const DataType l = lhs().result_type(schema);
      const DataType r = rhs().result_type(schema);
      if (is_numeric(l) != is_numeric(r)) {
        fail(ErrorKind::type_mismatch, fmt::format("comparison of {} with {} in {}", pbds::to_string(l),
                                                   pbds::to_string(r), to_string()));
      }
      return;
    }
    default:
      for (const auto& c : _children) c.check(schema);
  }
}

void Predicate::collect_attributes(std::set<std::string>& out) const {
  if (_kind == Kind::comparison) {
    lhs().collect_attributes(out);
    rhs().collect_attributes(out);
  }
  for (const auto& c : _children) c.collect_attributes(out);
}

std::string Predicate::to_string() const {
  switch (_kind) {
    case Kind::literal: return _literal ? "TRUE" : "FALSE";
    case Kind::comparison: return fmt::format("{} {} {}", lhs().to_string(), pbds::to_string(_op), rhs().to_string());
    case Kind::negation: return fmt::format("NOT ({})", _children.front().to_string());
    case Kind::conjunction:
    case Kind::disjunction: {
      std::string out;
      for (std::size_t i = 0; i < _children.size(); ++i) {
        if (i > 0) out += _kind == Kind::conjunction ? " AND " : " OR ";
        out += "(" + _children[i].to_string() + ")";
      }
      return out;
    }
  }
  return {};
}

bool Predicate::operator==(const Predicate& other) const {
  if (_kind != other._kind) return false;
  switch (_kind) {
    case Kind::literal: return _literal == other._literal;
    case Kind::comparison: return _op == other._op && lhs() == other.lhs() && rhs() == other.rhs();
    default: return _children == other._children;
  }
}

BoundPredicate::BoundPredicate(const Predicate& predicate, const Schema& schema) : _kind(predicate.kind()) {
  predicate.check(schema);
  switch (_kind) {
    case Predicate::Kind::literal: _literal = predicate.literal_value(); break;
    case Predicate::Kind::comparison:
      _op = predicate.op();
      _lhs = std::make_shared<BoundExpression>(predicate.lhs(), schema);
      _rhs = std::make_shared<BoundExpression>(predicate.rhs(), schema);
      break;
    default:
      for (const auto& c : predicate.children()) _children.emplace_back(c, schema);
  }
}

bool BoundPredicate::evaluate(const Tuple& tuple) const {
  switch (_kind) {
    case Predicate::Kind::literal: return _literal;
    case Predicate::Kind::comparison:
      return holds(_op, compare_values(_lhs->evaluate(tuple), _rhs->evaluate(tuple)));
    case Predicate::Kind::conjunction:
      for (const auto& c : _children) {
        if (!c.evaluate(tuple)) return false;
      }
      return true;
    case Predicate::Kind::disjunction:
      for (const auto& c : _children) {
        if (c.evaluate(tuple)) return true;
      }
      return false;
    case Predicate::Kind::negation: return !_children.front().evaluate(tuple);
  }
  return false;
}

}  // namespace pbds
