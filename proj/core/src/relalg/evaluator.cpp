#include "pbds/relalg/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

namespace {

struct Item {
  Tuple values;
  std::int64_t multiplicity;
  std::vector<RowRef> lineage;
};

struct Bag {
  Schema schema;
  std::vector<Item> items;
};

struct ValueEqual {
  bool operator()(const Value& a, const Value& b) const { return values_equal(a, b); }
};

void append(std::vector<RowRef>& into, const std::vector<RowRef>& from) {
  into.insert(into.end(), from.begin(), from.end());
}

/// Merges equal tuples, summing multiplicities and uniting lineage; keeps first-occurrence order.
std::vector<Item> consolidate(std::vector<Item> items) {
  std::unordered_map<Tuple, std::size_t, TupleHash, TupleEqual> index;
  std::vector<Item> out;
  out.reserve(items.size());
  for (auto& item : items) {
    auto [it, inserted] = index.try_emplace(item.values, out.size());
    if (inserted) {
      out.push_back(std::move(item));
    } else {
      Item& target = out[it->second];
      target.multiplicity += item.multiplicity;
      append(target.lineage, item.lineage);
    }
  }
  return out;
}

/// Running aggregate state shared by aggregation and window.
class Accumulator {
 public:
  Accumulator(AggFunction function, DataType input_type) : _function(function), _type(input_type) {}

  void add(const Value* value, std::int64_t multiplicity) {
    _count += multiplicity;
    if (value == nullptr) return;
    if (_type == DataType::integer) {
      const auto v = std::get<std::int64_t>(*value);
      _int_sum += v * multiplicity;
    } else {
      _real_sum += as_double(*value) * static_cast<double>(multiplicity);
    }
    if (!_extreme || (_function == AggFunction::min && compare_values(*value, *_extreme) < 0) ||
        (_function == AggFunction::max && compare_values(*value, *_extreme) > 0)) {
      _extreme = *value;
    }
  }

  Value result() const {
    switch (_function) {
      case AggFunction::count: return _count;
      case AggFunction::sum: return _type == DataType::integer ? Value(_int_sum) : Value(_real_sum);
      case AggFunction::avg:
        return (_type == DataType::integer ? static_cast<double>(_int_sum) : _real_sum) / static_cast<double>(_count);
      case AggFunction::min:
      case AggFunction::max: return *_extreme;
    }
    return _count;
  }

 private:
  AggFunction _function;
  DataType _type;
  std::int64_t _count = 0;
  std::int64_t _int_sum = 0;
  double _real_sum = 0.0;
  std::optional<Value> _extreme;
};

/// Orders tuples by a list of keys with per-key direction.
class OrderComparator {
 public:
  OrderComparator(const Schema& schema, const std::vector<OrderKey>& order) {
    for (const auto& k : order) _keys.emplace_back(schema.require(k.attribute), k.direction == SortDirection::descending);
  }

  int operator()(const Tuple& a, const Tuple& b) const {
    for (const auto& [index, descending] : _keys) {
      const int c = compare_values(a[index], b[index]);
      if (c != 0) return descending ? -c : c;
    }
    return 0;
  }

 private:
  std::vector<std::pair<std::size_t, bool>> _keys;
};

class Evaluator {
 public:
  Evaluator(const Database& db, bool trace) : _db(db), _trace(trace) {}

  Bag eval(const PlanNode& node) {
    switch (node.kind) {
      case OperatorKind::table_access: return table(node);
      case OperatorKind::selection: return selection(node);
      case OperatorKind::projection: return projection(node);
      case OperatorKind::union_all: return union_all(node);
      case OperatorKind::intersection:
      case OperatorKind::difference: return set_operation(node);
      case OperatorKind::cross_product:
      case OperatorKind::join: return product(node);
      case OperatorKind::aggregation: return aggregation(node);
      case OperatorKind::duplicate_elim: return duplicate_elim(node);
      case OperatorKind::window: return window(node);
      case OperatorKind::top_k: return top_k(node);
    }
    fail(ErrorKind::invalid_plan, "unknown operator");
  }

  const std::vector<std::string>& relation_names() const { return _names; }

 private:
  std::uint32_t relation_index(const std::string& name) {
    const auto it = std::find(_names.begin(), _names.end(), name);
    if (it != _names.end()) return static_cast<std::uint32_t>(it - _names.begin());
    _names.push_back(name);
    return static_cast<std::uint32_t>(_names.size() - 1);
  }

  Bag table(const PlanNode& node) {
    const Relation& rel = lookup(_db, node.relation);
    Bag out{rel.schema(), {}};
    out.items.reserve(rel.row_count());
    const std::uint32_t index = _trace ? relation_index(node.relation) : 0;
    for (const auto& row : rel.rows()) {
      Item item{row.values, row.multiplicity, {}};
      if (_trace) item.lineage.push_back({index, row.id});
      out.items.push_back(std::move(item));
    }
    return out;
  }

  Bag selection(const PlanNode& node) {
    Bag in = eval(node.children[0]);
    const BoundPredicate predicate(node.predicate, in.schema);
    Bag out{in.schema, {}};
    for (auto& item : in.items) {
      if (predicate.evaluate(item.values)) out.items.push_back(std::move(item));
    }
    return out;
  }

  Bag projection(const PlanNode& node) {
    Bag in = eval(node.children[0]);
    std::vector<BoundExpression> exprs;
    std::vector<Attribute> attrs;
    for (const auto& p : node.projections) {
      exprs.emplace_back(p.expression, in.schema);
      attrs.push_back({p.name, exprs.back().type()});
    }
    Bag out{Schema("", std::move(attrs)), {}};
    out.items.reserve(in.items.size());
    for (auto& item : in.items) {
      Tuple t;
      t.reserve(exprs.size());
      for (const auto& e : exprs) t.push_back(e.evaluate(item.values));
      out.items.push_back({std::move(t), item.multiplicity, std::move(item.lineage)});
    }
    out.items = consolidate(std::move(out.items));
    return out;
  }

  Bag union_all(const PlanNode& node) {
    const Schema schema = infer_schema(node, _db);
    Bag left = eval(node.children[0]);
    Bag right = eval(node.children[1]);
    Bag out{schema, std::move(left.items)};
    for (auto& item : right.items) out.items.push_back(std::move(item));
    out.items = consolidate(std::move(out.items));
    return out;
  }

  Bag set_operation(const PlanNode& node) {
    const Schema schema = infer_schema(node, _db);
    Bag left = eval(node.children[0]);
    Bag right = eval(node.children[1]);
    std::vector<Item> l = consolidate(std::move(left.items));
    std::vector<Item> r = consolidate(std::move(right.items));
    std::unordered_map<Tuple, std::size_t, TupleHash, TupleEqual> right_index;
    for (std::size_t i = 0; i < r.size(); ++i) right_index.emplace(r[i].values, i);
    Bag out{schema, {}};
    for (auto& item : l) {
      const auto it = right_index.find(item.values);
      const Item* match = it == right_index.end() ? nullptr : &r[it->second];
      const std::int64_t m = match ? match->multiplicity : 0;
      const std::int64_t n = node.kind == OperatorKind::intersection ? std::min(item.multiplicity, m)
                                                                     : std::max<std::int64_t>(item.multiplicity - m, 0);
      if (n <= 0) continue;
      item.multiplicity = n;
      if (match) append(item.lineage, match->lineage);
      out.items.push_back(std::move(item));
    }
    return out;
  }

  Bag product(const PlanNode& node) {
    const Schema schema = infer_schema(node, _db);
    Bag left = eval(node.children[0]);
    Bag right = eval(node.children[1]);
    Bag out{schema, {}};
    auto emit = [&](const Item& a, const Item& b) {
      Tuple t = a.values;
      t.insert(t.end(), b.values.begin(), b.values.end());
      Item item{std::move(t), a.multiplicity * b.multiplicity, a.lineage};
      append(item.lineage, b.lineage);
      out.items.push_back(std::move(item));
    };
    if (node.kind == OperatorKind::cross_product) {
      for (const auto& a : left.items) {
        for (const auto& b : right.items) emit(a, b);
      }
      return out;
    }
    const std::size_t li = left.schema.require(node.left_attribute);
    const std::size_t ri = right.schema.require(node.right_attribute);
    std::unordered_map<Value, std::vector<std::size_t>, ValueHash, ValueEqual> index;
    for (std::size_t i = 0; i < right.items.size(); ++i) index[right.items[i].values[ri]].push_back(i);
    for (const auto& a : left.items) {
      const auto it = index.find(a.values[li]);
      if (it == index.end()) continue;
      for (const std::size_t j : it->second) emit(a, right.items[j]);
    }
    return out;
  }

  struct Grouping {
    std::vector<Tuple> keys;
    std::vector<std::vector<std::size_t>> members;
  };

  static Grouping group(const std::vector<Item>& items, const std::vector<std::size_t>& key_indices) {
    Grouping g;
    std::unordered_map<Tuple, std::size_t, TupleHash, TupleEqual> index;
    for (std::size_t i = 0; i < items.size(); ++i) {
      Tuple key;
      key.reserve(key_indices.size());
      for (const std::size_t k : key_indices) key.push_back(items[i].values[k]);
      auto [it, inserted] = index.try_emplace(key, g.keys.size());
      if (inserted) {
        g.keys.push_back(std::move(key));
        g.members.emplace_back();
      }
      g.members[it->second].push_back(i);
    }
    return g;
  }

  Bag aggregation(const PlanNode& node) {
    const Schema schema = infer_schema(node, _db);
    Bag in = eval(node.children[0]);
    std::vector<std::size_t> keys;
    for (const auto& a : node.group_by) keys.push_back(in.schema.require(a));
    const bool star = node.input_attribute.empty();
    const std::size_t input = star ? 0 : in.schema.require(node.input_attribute);
    const DataType input_type = star ? DataType::integer : in.schema.attributes()[input].type;
    const Grouping g = group(in.items, keys);
    Bag out{schema, {}};
    for (std::size_t k = 0; k < g.keys.size(); ++k) {
      Accumulator acc(node.function, input_type);
      Item item{g.keys[k], 1, {}};
      for (const std::size_t i : g.members[k]) {
        acc.add(star ? nullptr : &in.items[i].values[input], in.items[i].multiplicity);
        append(item.lineage, in.items[i].lineage);
      }
      item.values.push_back(acc.result());
      out.items.push_back(std::move(item));
    }
    return out;
  }

  Bag duplicate_elim(const PlanNode& node) {
    Bag in = eval(node.children[0]);
    in.items = consolidate(std::move(in.items));
    for (auto& item : in.items) item.multiplicity = 1;
    return in;
  }

  Bag window(const PlanNode& node) {
    const Schema schema = infer_schema(node, _db);
    Bag in = eval(node.children[0]);
    std::vector<std::size_t> keys;
    for (const auto& a : node.group_by) keys.push_back(in.schema.require(a));
    const bool star = node.input_attribute.empty();
    const std::size_t input = star ? 0 : in.schema.require(node.input_attribute);
    const DataType input_type = star ? DataType::integer : in.schema.attributes()[input].type;
    const OrderComparator order(in.schema, node.order);
    const Grouping g = group(in.items, keys);
    std::vector<Value> results(in.items.size());
    std::vector<std::vector<RowRef>> partition_lineage(_trace ? in.items.size() : 0);
    for (const auto& members : g.members) {
      std::vector<std::size_t> sorted = members;
      std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return order(in.items[a].values, in.items[b].values) < 0;
      });
      Accumulator acc(node.function, input_type);
      std::size_t block = 0;
      while (block < sorted.size()) {
        // rows tied on the order key see each other
        std::size_t end = block;
        while (end < sorted.size() && order(in.items[sorted[block]].values, in.items[sorted[end]].values) == 0) {
          const Item& item = in.items[sorted[end]];
          acc.add(star ? nullptr : &item.values[input], item.multiplicity);
          ++end;
        }
        const Value v = acc.result();
        for (std::size_t i = block; i < end; ++i) results[sorted[i]] = v;
        block = end;
      }
      if (_trace) {
        std::vector<RowRef> all;
        for (const std::size_t i : members) append(all, in.items[i].lineage);
        for (const std::size_t i : members) partition_lineage[i] = all;
      }
    }
    Bag out{schema, {}};
    out.items.reserve(in.items.size());
    for (std::size_t i = 0; i < in.items.size(); ++i) {
      Item item = std::move(in.items[i]);
      item.values.push_back(results[i]);
      if (_trace) item.lineage = std::move(partition_lineage[i]);
      out.items.push_back(std::move(item));
    }
    return out;
  }

  Bag top_k(const PlanNode& node) {
    Bag in = eval(node.children[0]);
    const OrderComparator order(in.schema, node.order);
    std::vector<Item> items = consolidate(std::move(in.items));
    std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
      const int c = order(a.values, b.values);
      return c != 0 ? c < 0 : compare_tuples(a.values, b.values) < 0;
    });
    Bag out{in.schema, {}};
    std::int64_t remaining = node.limit;
    for (auto& item : items) {
      if (remaining <= 0) break;
      item.multiplicity = std::min(item.multiplicity, remaining);
      remaining -= item.multiplicity;
      out.items.push_back(std::move(item));
    }
    return out;
  }

  const Database& _db;
  bool _trace;
  std::vector<std::string> _names;
};

Relation to_relation(Bag bag, std::vector<std::vector<RowRef>>* lineage) {
  std::vector<Item> items = consolidate(std::move(bag.items));
  Relation out(bag.schema);
  out.reserve(items.size());
  for (auto& item : items) {
    out.add_row(std::move(item.values), item.multiplicity);
    if (lineage) {
      std::sort(item.lineage.begin(), item.lineage.end());
      item.lineage.erase(std::unique(item.lineage.begin(), item.lineage.end()), item.lineage.end());
      lineage->push_back(std::move(item.lineage));
    }
  }
  return out;
}

}  // namespace

Relation evaluate(const PlanNode& node, const Database& db) {
  infer_schema(node, db);
  Evaluator evaluator(db, false);
  return to_relation(evaluator.eval(node), nullptr);
}

Relation evaluate(const QueryPlan& plan, const Database& db) { return evaluate(plan.root(), db); }

TracedRelation evaluate_traced(const QueryPlan& plan, const Database& db) {
  infer_schema(plan.root(), db);
  Evaluator evaluator(db, true);
  std::vector<std::vector<RowRef>> lineage;
  Relation result = to_relation(evaluator.eval(plan.root()), &lineage);
  return TracedRelation{std::move(result), evaluator.relation_names(), std::move(lineage)};
}

}  // namespace pbds
