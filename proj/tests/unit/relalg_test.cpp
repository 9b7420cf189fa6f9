#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "fixtures.hpp"
#include "pbds/common/error.hpp"
#include "pbds/relalg/csv.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/relalg/plan_json.hpp"

using namespace pbds;
using namespace pbds::testing;

namespace {

Relation records(std::vector<std::int64_t> values) {
  Relation r(Schema("t", {{"records", DataType::integer}}));
  for (auto v : values) r.add_row({v});
  return r;
}

Database university() {
  Database db;
  Relation student(Schema("Student", {{"sid", DataType::integer}, {"name", DataType::text}, {"mid", DataType::integer}}));
  student.add_row({std::int64_t{1}, std::string("Peter"), std::int64_t{10}});
  student.add_row({std::int64_t{2}, std::string("Ana"), std::int64_t{11}});
  Relation major(Schema("Major", {{"id", DataType::integer}, {"major", DataType::text}}));
  major.add_row({std::int64_t{10}, std::string("CS")});
  major.add_row({std::int64_t{11}, std::string("Math")});
  db.emplace("Student", std::move(student));
  db.emplace("Major", std::move(major));
  return db;
}

// Π_{name,major} σ_{mid=id} (Π_* σ_{name='Peter'} Student × Major)
QueryPlan university_plan(const Database& db) {
  PlanNode peter = plan::select(compare("name", CompareOp::eq, std::string("Peter")), plan::table("Student"));
  const std::vector<std::string> names = infer_schema(peter, db).attribute_names();
  PlanNode star = plan::project(names, std::move(peter));
  PlanNode joined = plan::select(
      Predicate::compare(Expression::attribute("mid"), CompareOp::eq, Expression::attribute("id")),
      plan::cross(std::move(star), plan::table("Major")));
  return QueryPlan(plan::project(std::vector<std::string>{"name", "major"}, std::move(joined)));
}

}  // namespace

TEST(Evaluator, TopKKeepsLargest) {
  Database db;
  db.emplace("t", records({58, 83, 88}));
  const auto out = evaluate(QueryPlan(plan::top_k(2, {{"records", SortDirection::descending}}, plan::table("t"))), db);
  EXPECT_TRUE(bag_equal(out, records({88, 83})));
}

TEST(Evaluator, DistinctCollapsesMultiplicity) {
  Database db;
  Relation t(Schema("t", {{"x", DataType::integer}}));
  t.add_row({std::int64_t{7}}, 3);
  db.emplace("t", std::move(t));
  const auto out = evaluate(QueryPlan(plan::distinct(plan::table("t"))), db);
  EXPECT_EQ(out.size(), 1);
}

TEST(Evaluator, HighcrimeGroups) {
  const auto out = evaluate(highcrime(), crimes_micro());
  const auto bag = canonical_bag(out);
  ASSERT_EQ(bag.size(), 3u);
  // Output order: totcrimes first, then group-by attributes.
  std::map<std::int64_t, std::int64_t> sums;
  for (const auto& [t, m] : bag) {
    EXPECT_EQ(m, 1);
    const std::size_t pid = out.schema().require("pid");
    sums[std::get<std::int64_t>(t[pid])] = std::get<std::int64_t>(t[out.schema().require("totcrimes")]);
  }
  // Arithmetic sums of the shown rows.
  EXPECT_EQ(sums, (std::map<std::int64_t, std::int64_t>{{2, 157}, {4, 174}, {8, 182}}));
}

TEST(Evaluator, BagUnionAddsMultiplicities) {
  Database db;
  db.emplace("t", records({1, 2}));
  const auto out = evaluate(QueryPlan(plan::union_all(plan::table("t"), plan::table("t"))), db);
  EXPECT_EQ(out.size(), 4);
}

TEST(Evaluator, DifferenceIsBagMonus) {
  Database db;
  Relation t(Schema("t", {{"x", DataType::integer}}));
  t.add_row({std::int64_t{1}}, 3);
  t.add_row({std::int64_t{2}});
  db.emplace("t", std::move(t));
  PlanNode one = plan::select(compare("x", CompareOp::eq, std::int64_t{1}), plan::table("t"));
  const auto out = evaluate(QueryPlan(plan::difference(plan::table("t"), plan::distinct(std::move(one)))), db);
  Relation expected(Schema("e", {{"x", DataType::integer}}));
  expected.add_row({std::int64_t{1}}, 2);
  expected.add_row({std::int64_t{2}});
  EXPECT_TRUE(bag_equal(out, expected));
}

TEST(Evaluator, AggregateOfEmptyInputHasNoGroups) {
  // One output row per distinct group value; empty input has none, even without group-by.
  Database db;
  db.emplace("t", records({}));
  const auto out = evaluate(QueryPlan(plan::aggregate(AggFunction::count, "", "n", {}, plan::table("t"))), db);
  EXPECT_EQ(out.size(), 0);
}

TEST(Evaluator, UnknownAttributeIsRejected) {
  try {
    evaluate(QueryPlan(plan::select(compare("nope", CompareOp::eq, std::int64_t{1}), plan::table("crimes"))),
             crimes_micro());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_attribute);
  }
}

TEST(Plan, IdsArePreorder) {
  const Database db = university();
  const QueryPlan q = university_plan(db);
  ASSERT_EQ(q.node_count(), 7u);
  EXPECT_EQ(q.node(1).kind, OperatorKind::projection);
  EXPECT_EQ(q.node(2).kind, OperatorKind::selection);
  EXPECT_EQ(q.node(3).kind, OperatorKind::cross_product);
  EXPECT_EQ(q.node(4).kind, OperatorKind::projection);
  EXPECT_EQ(q.node(5).kind, OperatorKind::selection);
  EXPECT_EQ(q.node(6).relation, "Student");
  EXPECT_EQ(q.node(7).relation, "Major");
  EXPECT_EQ(q.path_to_root(6), (std::vector<OperatorId>{1, 2, 3, 4, 5}));
  EXPECT_EQ(q.path_to_root(7), (std::vector<OperatorId>{1, 2, 3}));
  EXPECT_EQ(q.path_to_root(1), (std::vector<OperatorId>{1}));
  EXPECT_EQ(canonical_bag(evaluate(q, db)).size(), 1u);
}

TEST(Plan, MovedPlanKeepsItsNodes) {
  QueryPlan a = highcrime();
  QueryPlan b(std::move(a));
  EXPECT_EQ(&b.node(1), &b.root());
  EXPECT_EQ(b.node(2).kind, OperatorKind::aggregation);
  QueryPlan c(plan::table("crimes"));
  c = std::move(b);
  EXPECT_EQ(&c.node(1), &c.root());
  EXPECT_EQ(c.path_to_root(3), (std::vector<OperatorId>{1, 2}));
  std::vector<QueryPlan> v;
  for (int i = 0; i < 50; ++i) v.push_back(highcrime());
  EXPECT_EQ(&v.front().node(1), &v.front().root());
}

TEST(Plan, SingleTableGetsIdOne) {
  const QueryPlan q(plan::table("crimes"));
  EXPECT_EQ(q.root().id, 1);
  EXPECT_EQ(q.table_accesses(), std::vector<OperatorId>{1});
}

TEST(Plan, RandomTreesMatchRecursiveNumbering) {
  Rng rng = make_rng(64);
  for (int i = 0; i < 200; ++i) {
    const Database db = random_database(rng, 10);
    const QueryPlan q(random_plan(rng, db, 4));
    // Independent numbering and parent map by recursion over the tree.
    std::vector<const PlanNode*> order;
    std::map<const PlanNode*, const PlanNode*> parent;
    std::function<void(const PlanNode&, const PlanNode*)> walk = [&](const PlanNode& n, const PlanNode* p) {
      order.push_back(&n);
      parent[&n] = p;
      for (const auto& c : n.children) walk(c, &n);
    };
    walk(q.root(), nullptr);
    ASSERT_EQ(order.size(), q.node_count());
    for (std::size_t k = 0; k < order.size(); ++k) {
      EXPECT_EQ(order[k]->id, static_cast<OperatorId>(k + 1));
      std::vector<OperatorId> expected;
      for (const PlanNode* p = parent[order[k]]; p; p = parent[p]) expected.insert(expected.begin(), p->id);
      if (expected.empty()) expected.push_back(order[k]->id);
      EXPECT_EQ(q.path_to_root(order[k]->id), expected);
    }
  }
}

TEST(PlanJson, RoundTripsRandomPlans) {
  Rng rng = make_rng(65);
  for (int i = 0; i < 200; ++i) {
    const Database db = random_database(rng, 10);
    const QueryPlan q(random_plan(rng, db, 4));
    const QueryPlan back = plan_from_json(plan_to_json(q));
    EXPECT_EQ(plan_to_json(back), plan_to_json(q));
    EXPECT_TRUE(bag_equal(evaluate(back, db), evaluate(q, db)));
  }
}

TEST(PlanJson, MalformedInputIsParseError) {
  try {
    plan_from_json(R"({"op": "select", "child": {"op": "table", "relation": "t"}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
  }
}

TEST(Csv, RoundTripKeepsBag) {
  const Database db = crimes_micro();
  std::ostringstream out;
  write_csv(out, lookup(db, "crimes"));
  std::istringstream in(out.str());
  EXPECT_TRUE(bag_equal(read_csv(in, lookup(db, "crimes").schema()), lookup(db, "crimes")));
}

TEST(Csv, EmptyFieldIsRejected) {
  std::istringstream in("pid,month,year,numcrimes\n1,,2010,5\n");
  EXPECT_THROW(read_csv(in, lookup(crimes_micro(), "crimes").schema()), Error);
}

TEST(Value, IntegerAndRealCompareNumerically) {
  EXPECT_EQ(compare_values(Value(std::int64_t{2}), Value(2.0)), 0);
  EXPECT_LT(compare_values(Value(std::int64_t{2}), Value(2.5)), 0);
  EXPECT_THROW(compare_values(Value(std::int64_t{2}), Value(std::string("x"))), Error);
}
