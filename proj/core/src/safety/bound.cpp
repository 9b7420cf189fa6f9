#include "pbds/safety/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

Bound Bound::at_least(double c) { return Bound(Kind::at_least, c, inf); }
Bound Bound::at_most(double c) { return Bound(Kind::at_most, -inf, c); }
Bound Bound::unknown() { return Bound(Kind::unknown, -inf, inf); }

Bound Bound::exact_interval(double lo, double hi) {
  if (!(lo <= hi)) fail(ErrorKind::invalid_argument, fmt::format("interval [{}, {}] is empty", lo, hi));
  return Bound(Kind::exact_interval, lo, hi);
}

Bound Bound::between(double lo, double hi) {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (has_lo && has_hi) return exact_interval(lo, hi);
  if (has_lo) return at_least(lo);
  if (has_hi) return at_most(hi);
  return unknown();
}

std::optional<double> Bound::lower() const {
  if (_kind == Kind::at_least || _kind == Kind::exact_interval) return _lo;
  return std::nullopt;
}

std::optional<double> Bound::upper() const {
  if (_kind == Kind::at_most || _kind == Kind::exact_interval) return _hi;
  return std::nullopt;
}

bool Bound::contains(double v) const { return _lo <= v && v <= _hi; }

std::string Bound::to_string() const {
  switch (_kind) {
    case Kind::at_least: return fmt::format("at_least({})", _lo);
    case Kind::at_most: return fmt::format("at_most({})", _hi);
    case Kind::exact_interval: return fmt::format("exact_interval({}, {})", _lo, _hi);
    case Kind::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

/// Value range of an attribute over all output tuples. lo > hi encodes a provably empty output.
/// exact_lo / exact_hi mean the endpoint is attained whenever the output is nonempty.
struct ValueRange {
  double lo = -inf;
  double hi = inf;
  bool exact_lo = false;
  bool exact_hi = false;

  bool empty() const { return lo > hi; }
  static ValueRange nothing() { return {inf, -inf, false, false}; }
  ValueRange loose() const { return {lo, hi, false, false}; }
};

ValueRange hull(const ValueRange& a, const ValueRange& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi), a.exact_lo && b.exact_lo, a.exact_hi && b.exact_hi};
}

ValueRange meet(const ValueRange& a, const ValueRange& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi), false, false};
}

/// x * y where an unbounded endpoint times zero is zero (actual values are finite).
double times(double x, double y) { return (x == 0.0 || y == 0.0) ? 0.0 : x * y; }

ValueRange multiply(const ValueRange& a, const ValueRange& b) {
  if (a.empty() || b.empty()) return ValueRange::nothing();
  const double c[] = {times(a.lo, b.lo), times(a.lo, b.hi), times(a.hi, b.lo), times(a.hi, b.hi)};
  return {*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c)), false, false};
}

class RangeAnalysis {
 public:
  explicit RangeAnalysis(const Database& db) : _db(db) {}

  ValueRange attribute(const PlanNode& node, const std::string& name) {
    switch (node.kind) {
      case OperatorKind::table_access: return column(lookup(_db, node.relation), name);
      case OperatorKind::selection: return selection(node, name);
      case OperatorKind::projection: {
        for (const auto& item : node.projections) {
          if (item.name != name) continue;
          ValueRange r = expression(node.children[0], item.expression);
          if (!item.expression.is_attribute()) r = r.loose();
          return r;
        }
        fail(ErrorKind::unknown_attribute, fmt::format("attribute '{}' not produced by projection", name));
      }
      case OperatorKind::union_all:
      case OperatorKind::intersection:
      case OperatorKind::difference: {
        const ValueRange l = attribute(node.children[0], name);
        if (node.kind == OperatorKind::difference) return l.loose();
        const std::size_t pos = infer_schema(node.children[0], _db).require(name);
        const std::string other = infer_schema(node.children[1], _db).attributes()[pos].name;
        const ValueRange r = attribute(node.children[1], other);
        return node.kind == OperatorKind::union_all ? hull(l, r) : meet(l, r);
      }
      case OperatorKind::cross_product:
      case OperatorKind::join: return product(node, name);
      case OperatorKind::aggregation:
      case OperatorKind::window: {
        const PlanNode& child = node.children[0];
        if (name != node.output_attribute) {
          const ValueRange r = attribute(child, name);
          // grouping keeps every distinct key, so attained endpoints survive
          return r;
        }
        return aggregate(node);
      }
      case OperatorKind::duplicate_elim: return attribute(node.children[0], name);
      case OperatorKind::top_k: {
        if (node.limit == 0) return ValueRange::nothing();
        return attribute(node.children[0], name).loose();
      }
    }
    return {};
  }

  ValueRange expression(const PlanNode& input, const Expression& e) {
    switch (e.kind()) {
      case Expression::Kind::attribute: return attribute(input, e.name());
      case Expression::Kind::constant: {
        if (std::holds_alternative<std::string>(e.value())) return {};
        const double c = as_double(e.value());
        return {c, c, true, true};
      }
      case Expression::Kind::binary: break;
    }
    const ValueRange a = expression(input, e.lhs());
    const ValueRange b = expression(input, e.rhs());
    if (a.empty() || b.empty()) return ValueRange::nothing();
    switch (e.op()) {
      case '+': return {a.lo + b.lo, a.hi + b.hi, false, false};
      case '-': return {a.lo - b.hi, a.hi - b.lo, false, false};
      default: return multiply(a, b);
    }
  }

 private:
  ValueRange column(const Relation& rel, const std::string& name) {
    const std::size_t index = rel.schema().require(name);
    if (!is_numeric(rel.schema().attributes()[index].type)) return {};
    if (rel.empty()) return ValueRange::nothing();
    ValueRange r{inf, -inf, true, true};
    for (const auto& row : rel.rows()) {
      const double v = as_double(row.values[index]);
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
    return r;
  }

  ValueRange selection(const PlanNode& node, const std::string& name) {
    ValueRange r = attribute(node.children[0], name).loose();
    if (r.empty()) return r;
    const ValueRange implied = implied_by(node.predicate, node.children[0], name);
    return meet(r, implied);
  }

  /// Range that `name` must lie in for the predicate to hold.
  ValueRange implied_by(const Predicate& p, const PlanNode& input, const std::string& name) {
    switch (p.kind()) {
      case Predicate::Kind::literal: return p.literal_value() ? ValueRange{} : ValueRange::nothing();
      case Predicate::Kind::negation: return {};
      case Predicate::Kind::conjunction: {
        ValueRange r;
        for (const auto& c : p.children()) r = meet(r, implied_by(c, input, name));
        return r;
      }
      case Predicate::Kind::disjunction: {
        ValueRange r = ValueRange::nothing();
        for (const auto& c : p.children()) r = hull(r, implied_by(c, input, name)).loose();
        return r;
      }
      case Predicate::Kind::comparison: break;
    }
    CompareOp op = p.op();
    const Expression* other = nullptr;
    if (p.lhs().is_attribute() && p.lhs().name() == name) {
      other = &p.rhs();
    } else if (p.rhs().is_attribute() && p.rhs().name() == name) {
      other = &p.lhs();
      op = mirrored(op);
    } else {
      return {};
    }
    if (infer_schema(input, _db).attribute(name).type == DataType::text) return {};
    const ValueRange e = expression(input, *other);
    if (e.empty()) return ValueRange::nothing();
    switch (op) {
      case CompareOp::lt:
      case CompareOp::le: return {-inf, e.hi, false, false};
      case CompareOp::ge:
      case CompareOp::gt: return {e.lo, inf, false, false};
      case CompareOp::eq: return {e.lo, e.hi, false, false};
    }
    return {};
  }

  ValueRange product(const PlanNode& node, const std::string& name) {
    const Schema left = infer_schema(node.children[0], _db);
    const bool on_left = left.contains(name);
    const PlanNode& side = node.children[on_left ? 0 : 1];
    ValueRange r = attribute(side, name).loose();
    if (node.kind == OperatorKind::join) {
      const bool is_key = on_left ? name == node.left_attribute : name == node.right_attribute;
      if (is_key) {
        const PlanNode& opposite = node.children[on_left ? 1 : 0];
        const std::string& key = on_left ? node.right_attribute : node.left_attribute;
        if (infer_schema(opposite, _db).attribute(key).type != DataType::text) r = meet(r, attribute(opposite, key));
      }
    }
    return r;
  }

  ValueRange aggregate(const PlanNode& node) {
    if (node.function == AggFunction::count) return {0, inf, false, false};
    const ValueRange in = attribute(node.children[0], node.input_attribute);
    if (in.empty()) return ValueRange::nothing();
    switch (node.function) {
      case AggFunction::sum: {
        // every group is nonempty, so a one-signed input keeps the sum beyond its nearest endpoint
        if (in.lo >= 0) return {in.lo, inf, false, false};
        if (in.hi <= 0) return {-inf, in.hi, false, false};
        return {};
      }
      default: return in.loose();
    }
  }

  const Database& _db;
};

Bound to_min_bound(const ValueRange& r) {
  if (r.empty()) return Bound::unknown();
  if (r.exact_lo && std::isfinite(r.lo)) return Bound::exact_interval(r.lo, r.lo);
  return Bound::between(r.lo, r.hi);
}

Bound to_max_bound(const ValueRange& r) {
  if (r.empty()) return Bound::unknown();
  if (r.exact_hi && std::isfinite(r.hi)) return Bound::exact_interval(r.hi, r.hi);
  return Bound::between(r.lo, r.hi);
}

ValueRange analyse(const PlanNode& node, const std::string& attribute, const Database& db) {
  infer_schema(node, db).require(attribute);
  return RangeAnalysis(db).attribute(node, attribute);
}

}  // namespace

Bound min_value(const PlanNode& node, const std::string& attribute, const Database& db) {
  return to_min_bound(analyse(node, attribute, db));
}

Bound max_value(const PlanNode& node, const std::string& attribute, const Database& db) {
  return to_max_bound(analyse(node, attribute, db));
}

Bound min_value(const QueryPlan& plan, const std::string& attribute, const Database& db) {
  return min_value(plan.root(), attribute, db);
}

Bound max_value(const QueryPlan& plan, const std::string& attribute, const Database& db) {
  return max_value(plan.root(), attribute, db);
}

Bound value_bound(const PlanNode& node, const std::string& attribute, const Database& db) {
  const ValueRange r = analyse(node, attribute, db);
  if (r.empty()) return Bound::unknown();
  return Bound::between(r.lo, r.hi);
}

}  // namespace pbds
