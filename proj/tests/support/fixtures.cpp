#include "fixtures.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pbds/relalg/csv.hpp"

namespace pbds::testing {

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

Database crimes_micro() {
  const Schema schema("crimes", {{"pid", DataType::integer},
                                 {"month", DataType::integer},
                                 {"year", DataType::integer},
                                 {"numcrimes", DataType::integer}});
  std::istringstream in(crimes_csv);
  Database db;
  db.emplace("crimes", read_csv(in, schema));
  return db;
}

QueryPlan highcrime() {
  return QueryPlan(plan::select(compare("totcrimes", CompareOp::ge, std::int64_t{100}),
                                plan::aggregate(AggFunction::sum, "numcrimes", "totcrimes", {"pid", "month", "year"},
                                                plan::table("crimes"))));
}

RangeSet pid_ranges() { return RangeSet("pid", {{1, 3}, {4, 6}, {7, 9}}); }
RangeSet month_ranges() { return RangeSet("month", {{1, 4}, {5, 8}, {9, 12}}); }
RangeSet year_ranges() { return RangeSet("year", {{2010, 2012}, {2013, 2020}, {2021, 2024}}); }

namespace {

Relation random_relation(Rng& rng, const std::string& name, const std::vector<std::string>& attrs, int max_rows) {
  std::vector<Attribute> schema;
  for (const auto& a : attrs) schema.push_back({a, DataType::integer});
  Relation rel(Schema(name, schema));
  const auto rows = uniform_int(rng, 1, max_rows);
  // Narrow value ranges give duplicate keys, so groups have several rows.
  for (std::int64_t i = 0; i < rows; ++i) {
    Tuple t;
    for (std::size_t k = 0; k < attrs.size(); ++k) t.emplace_back(uniform_int(rng, k == 0 ? 0 : -20, k == 0 ? 5 : 20));
    rel.add_row(std::move(t), uniform_int(rng, 1, 4) == 1 ? 2 : 1);
  }
  return rel;
}

CompareOp random_op(Rng& rng) {
  static const CompareOp ops[] = {CompareOp::lt, CompareOp::le, CompareOp::eq, CompareOp::ge, CompareOp::gt};
  return ops[uniform_index(rng, 5)];
}

AggFunction random_function(Rng& rng) {
  static const AggFunction fs[] = {AggFunction::sum, AggFunction::count, AggFunction::min, AggFunction::max,
                                   AggFunction::avg};
  return fs[uniform_index(rng, 5)];
}

const std::string& pick(Rng& rng, const std::vector<std::string>& v) { return v[uniform_index(rng, v.size())]; }

std::vector<std::string> numeric_attributes(const PlanNode& node, const Database& db) {
  std::vector<std::string> out;
  const Schema schema = infer_schema(node, db);
  for (const auto& a : schema.attributes()) {
    if (is_numeric(a.type)) out.push_back(a.name);
  }
  return out;
}

std::vector<std::string> random_subset(Rng& rng, const std::vector<std::string>& from, std::size_t max) {
  std::vector<std::string> pool = from;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min<std::size_t>(pool.size(), uniform_index(rng, max + 1)));
  return pool;
}

Predicate random_atom(Rng& rng, const std::vector<std::string>& attrs) {
  return compare(pick(rng, attrs), random_op(rng), std::int64_t{uniform_int(rng, -10, 10)});
}

int fresh = 0;
std::string fresh_name(const char* prefix) { return prefix + std::to_string(++fresh); }


PlanNode random_unary(Rng& rng, const Database& db, PlanNode child) {
  const auto attrs = numeric_attributes(child, db);
  switch (uniform_index(rng, 7)) {
    case 0: {
      Predicate p = random_atom(rng, attrs);
      if (uniform_index(rng, 3) == 0) p = p && random_atom(rng, attrs);
      if (uniform_index(rng, 5) == 0) p = p || random_atom(rng, attrs);
      return plan::select(std::move(p), std::move(child));
    }
    case 1: {
      std::vector<ProjectionItem> items;
      for (const auto& a : random_subset(rng, attrs, attrs.size())) items.push_back({Expression::attribute(a), a});
      if (items.empty() || uniform_index(rng, 2) == 0) {
        const auto& a = pick(rng, attrs);
        const auto& b = pick(rng, attrs);
        Expression e = uniform_index(rng, 2) == 0 ? Expression::attribute(a) + Expression::attribute(b)
                                                  : Expression::attribute(a) * Expression::constant(std::int64_t{-2});
        items.push_back({e, fresh_name("x")});
      }
      return plan::project(std::move(items), std::move(child));
    }
    case 2: {
      const AggFunction f = random_function(rng);
      return plan::aggregate(f, f == AggFunction::count ? "" : pick(rng, attrs), fresh_name("g"),
                             random_subset(rng, attrs, 2), std::move(child));
    }
    case 3: return plan::distinct(std::move(child));
    case 4: {
      std::vector<OrderKey> order{{pick(rng, attrs), uniform_index(rng, 2) ? SortDirection::ascending
                                                                           : SortDirection::descending}};
      return plan::top_k(uniform_int(rng, 1, 5), std::move(order), std::move(child));
    }
    case 5: {
      const AggFunction f = random_function(rng);
      return plan::window(f, f == AggFunction::count ? "" : pick(rng, attrs), fresh_name("w"),
                          random_subset(rng, attrs, 1), {{pick(rng, attrs), SortDirection::ascending}},
                          std::move(child));
    }
    default: {
      // Union, intersection or difference with a filtered copy keeps the schemas compatible.
      PlanNode other = plan::select(random_atom(rng, attrs), child);
      switch (uniform_index(rng, 3)) {
        case 0: return plan::union_all(std::move(child), std::move(other));
        case 1: return plan::intersect(std::move(child), std::move(other));
        default: return plan::difference(std::move(child), std::move(other));
      }
    }
  }
}

PlanNode grow(Rng& rng, const Database& db, PlanNode node, int steps) {
  for (int i = 0; i < steps; ++i) node = random_unary(rng, db, std::move(node));
  return node;
}

PlanNode random_over(Rng& rng, const Database& db, int depth, bool left_side) {
  return grow(rng, db, plan::table(left_side ? "R" : "S"), depth);
}

}  // namespace

Database random_database(Rng& rng, int max_rows) {
  Database db;
  db.emplace("R", random_relation(rng, "R", {"a", "b", "c"}, max_rows));
  db.emplace("S", random_relation(rng, "S", {"d", "e"}, max_rows));
  return db;
}

PlanNode random_plan(Rng& rng, const Database& db, int depth) {
  const int left_depth = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(depth) + 1));
  PlanNode left = random_over(rng, db, left_depth, true);
  if (uniform_index(rng, 3) == 0) {
    // Binary combination of R-side and S-side subtrees; names never clash across sides.
    PlanNode right = random_over(rng, db, static_cast<int>(uniform_index(rng, 2)), false);
    const auto la = numeric_attributes(left, db);
    const auto ra = numeric_attributes(right, db);
    PlanNode both = uniform_index(rng, 2) == 0 ? plan::join(pick(rng, la), pick(rng, ra), std::move(left), std::move(right))
                                               : plan::cross(std::move(left), std::move(right));
    return grow(rng, db, std::move(both), depth - left_depth);
  }
  return left;
}

RangeSet random_ranges(Rng& rng, const Relation& rel, const std::string& attribute) {
  const std::size_t col = rel.schema().require(attribute);
  std::int64_t lo = 0, hi = 0;
  bool first = true;
  for (const auto& row : rel.rows()) {
    const auto v = std::get<std::int64_t>(row.values[col]);
    lo = first ? v : std::min(lo, v);
    hi = first ? v : std::max(hi, v);
    first = false;
  }
  std::set<std::int64_t> cuts;
  const auto k = uniform_int(rng, 0, 4);
  for (std::int64_t i = 0; i < k && hi > lo; ++i) cuts.insert(uniform_int(rng, lo, hi - 1));
  std::vector<Range> ranges;
  std::int64_t start = lo;
  for (const auto c : cuts) {
    ranges.push_back({static_cast<double>(start), static_cast<double>(c)});
    start = c + 1;
  }
  ranges.push_back({static_cast<double>(start), static_cast<double>(hi)});
  return RangeSet(attribute, std::move(ranges));
}

const std::vector<SafetyTemplate>& safety_templates() {
  static const std::vector<SafetyTemplate> all{SafetyTemplate::spj,      SafetyTemplate::agh,    SafetyTemplate::topk,
                                               SafetyTemplate::nested,   SafetyTemplate::join_agh,
                                               SafetyTemplate::window,   SafetyTemplate::difference};
  return all;
}

std::string to_string(SafetyTemplate t) {
  switch (t) {
    case SafetyTemplate::spj: return "spj";
    case SafetyTemplate::agh: return "agh";
    case SafetyTemplate::topk: return "topk";
    case SafetyTemplate::nested: return "nested";
    case SafetyTemplate::join_agh: return "join_agh";
    case SafetyTemplate::window: return "window";
    case SafetyTemplate::difference: return "difference";
  }
  return "?";
}

namespace {

const std::vector<std::string> r_attrs{"a", "b", "c"};

PlanNode where(Rng& rng, PlanNode child, const std::vector<std::string>& attrs) {
  if (uniform_index(rng, 2) == 0) return child;
  return plan::select(random_atom(rng, attrs), std::move(child));
}

PlanNode agh(Rng& rng, PlanNode input, const std::vector<std::string>& attrs, const std::string& out) {
  const AggFunction f = random_function(rng);
  auto group = random_subset(rng, attrs, 2);
  PlanNode g = plan::aggregate(f, f == AggFunction::count ? "" : pick(rng, attrs), out, group, std::move(input));
  Predicate having = compare(out, random_op(rng), std::int64_t{uniform_int(rng, -15, 30)});
  if (uniform_index(rng, 4) == 0) having = having && compare(out, random_op(rng), std::int64_t{uniform_int(rng, -15, 30)});
  return plan::select(std::move(having), std::move(g));
}

}  // namespace

PlanNode random_template_plan(Rng& rng, const Database& db, SafetyTemplate t) {
  (void)db;
  switch (t) {
    case SafetyTemplate::spj: {
      PlanNode base = where(rng, plan::table("R"), r_attrs);
      if (uniform_index(rng, 2) == 0) base = plan::join(pick(rng, r_attrs), "d", std::move(base), plan::table("S"));
      auto keep = random_subset(rng, r_attrs, 3);
      if (keep.empty()) keep.push_back("a");
      return plan::project(keep, std::move(base));
    }
    case SafetyTemplate::agh: return agh(rng, where(rng, plan::table("R"), r_attrs), r_attrs, "agg");
    case SafetyTemplate::topk: {
      const AggFunction f = random_function(rng);
      auto group = random_subset(rng, r_attrs, 2);
      if (group.empty()) group.push_back("a");
      PlanNode g = plan::aggregate(f, f == AggFunction::count ? "" : pick(rng, r_attrs), "agg", group,
                                   where(rng, plan::table("R"), r_attrs));
      std::vector<OrderKey> order;
      if (uniform_index(rng, 2) == 0) {
        order.push_back({"agg", uniform_index(rng, 2) ? SortDirection::ascending : SortDirection::descending});
      } else {
        for (const auto& a : group) order.push_back({a, SortDirection::ascending});
      }
      return plan::top_k(uniform_int(rng, 1, 4), std::move(order), std::move(g));
    }
    case SafetyTemplate::nested: {
      std::vector<std::string> group{"a", uniform_index(rng, 2) ? "b" : "c"};
      const AggFunction f = random_function(rng);
      PlanNode inner = plan::aggregate(f, f == AggFunction::count ? "" : pick(rng, r_attrs), "agg", group,
                                       where(rng, plan::table("R"), r_attrs));
      inner = plan::select(compare("agg", random_op(rng), std::int64_t{uniform_int(rng, -15, 30)}), std::move(inner));
      const AggFunction f2 = random_function(rng);
      PlanNode outer = plan::aggregate(f2, f2 == AggFunction::count ? "" : "agg", "agg2", {"a"}, std::move(inner));
      return plan::select(compare("agg2", random_op(rng), std::int64_t{uniform_int(rng, -15, 30)}), std::move(outer));
    }
    case SafetyTemplate::join_agh: {
      PlanNode j = plan::join(pick(rng, r_attrs), "d", where(rng, plan::table("R"), r_attrs), plan::table("S"));
      return agh(rng, std::move(j), {"a", "b", "c", "d", "e"}, "agg");
    }
    case SafetyTemplate::window: {
      const AggFunction f = random_function(rng);
      PlanNode w = plan::window(f, f == AggFunction::count ? "" : pick(rng, r_attrs), "w", random_subset(rng, r_attrs, 1),
                                {{pick(rng, r_attrs), SortDirection::ascending}}, where(rng, plan::table("R"), r_attrs));
      if (uniform_index(rng, 2) == 0) return w;
      return plan::select(compare("w", random_op(rng), std::int64_t{uniform_int(rng, -15, 30)}), std::move(w));
    }
    case SafetyTemplate::difference: {
      PlanNode left = where(rng, plan::table("R"), r_attrs);
      PlanNode right = plan::select(random_atom(rng, r_attrs), plan::table("R"));
      if (uniform_index(rng, 2) == 0) right = plan::select(compare("a", CompareOp::gt, std::int64_t{100}), plan::table("R"));
      return plan::difference(std::move(left), std::move(right));
    }
  }
  return plan::table("R");
}

WorkloadSpec crimes_workload(std::size_t queries, std::uint64_t seed, std::size_t distinct_templates) {
  WorkloadSpec s;
  s.kind = QueryTemplate::agh;
  s.fact = "crimes";
  s.group_by = {"district", "beat", "ward", "community", "year", "month"};
  s.max_group_arity = 2;
  s.aggregation_inputs = {"numcrimes", "arrests"};
  s.functions = {AggFunction::sum, AggFunction::avg, AggFunction::count};
  s.query_count = queries;
  s.distinct_templates = distinct_templates;
  s.seed = seed;
  return s;
}

}  // namespace pbds::testing
