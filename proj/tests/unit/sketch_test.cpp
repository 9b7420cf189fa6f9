#include <gtest/gtest.h>

#include <thread>

#include "fixtures.hpp"
#include "pbds/common/error.hpp"
#include "pbds/lineage/lineage.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/sketch/fingerprint.hpp"
#include "pbds/sketch/sketch.hpp"
#include "pbds/sketch/sketch_index.hpp"

using namespace pbds;
using namespace pbds::testing;

namespace {

Sketch crimes_sketch(const RangeSet& ranges) {
  const Database db = crimes_micro();
  return capture(highcrime(), db, build_range_partition(lookup(db, "crimes"), ranges));
}

QueryPlan highcrime_at(std::int64_t c) {
  return QueryPlan(plan::select(compare("totcrimes", CompareOp::ge, c),
                                plan::aggregate(AggFunction::sum, "numcrimes", "totcrimes", {"pid", "month", "year"},
                                                plan::table("crimes"))));
}

bool contained(const Sketch& s, const QueryPlan& q, const Database& db) {
  const Relation inst = instance(s, db);
  std::set<RowId> ids;
  for (const auto& row : inst.rows()) ids.insert(row.id);
  const Provenance prov = lineage(q, db);
  for (const RowId id : prov.of(s.relation)) {
    if (!ids.count(id)) return false;
  }
  return true;
}

}  // namespace

TEST(Capture, RunningExampleSketches) {
  EXPECT_EQ(crimes_sketch(year_ranges()).bits, (std::vector<bool>{false, true, false}));
  EXPECT_EQ(crimes_sketch(pid_ranges()).bits, (std::vector<bool>{true, true, true}));
  EXPECT_EQ(crimes_sketch(month_ranges()).bits, (std::vector<bool>{true, true, false}));
}

TEST(Instance, YearSketchHasFiveRows) {
  const Database db = crimes_micro();
  const Relation inst = instance(crimes_sketch(year_ranges()), db);
  EXPECT_EQ(inst.size(), 5);
  for (const auto& row : inst.rows()) {
    const auto y = std::get<std::int64_t>(row.values[2]);
    EXPECT_TRUE(y >= 2013 && y <= 2020);
  }
}

TEST(Instance, AllMembersIsFullRelation) {
  const Database db = crimes_micro();
  EXPECT_TRUE(bag_equal(instance(crimes_sketch(pid_ranges()), db), lookup(db, "crimes")));
}

TEST(Selectivity, RunningExample) {
  const Database db = crimes_micro();
  EXPECT_EQ(selectivity(crimes_sketch(pid_ranges()), db), 1.0);
  EXPECT_EQ(selectivity(crimes_sketch(month_ranges()), db), 0.875);
  EXPECT_EQ(selectivity(crimes_sketch(year_ranges()), db), 0.625);
  const Sketch empty = make_sketch(build_range_partition(lookup(db, "crimes"), year_ranges()), {false, false, false});
  EXPECT_EQ(selectivity(empty, db), 0.0);
}

TEST(CompileFilter, YearSketchIsOneInterval) {
  const Predicate p = compile_filter(crimes_sketch(year_ranges()));
  const Predicate expected = compare("year", CompareOp::ge, std::int64_t{2013}) && compare("year", CompareOp::le, std::int64_t{2020});
  EXPECT_EQ(p, expected);
}

TEST(CompileFilter, AlternatingMembersGiveTwoDisjuncts) {
  const Relation t = [] {
    Relation r(Schema("t", {{"v", DataType::integer}}));
    for (std::int64_t i = 1; i <= 40; ++i) r.add_row({i});
    return r;
  }();
  Database db;
  db.emplace("t", t);
  const Sketch s = make_sketch(build_range_partition(t, RangeSet("v", {{1, 10}, {11, 20}, {21, 30}, {31, 40}})),
                               {true, false, true, false});
  const Predicate p = compile_filter(s);
  EXPECT_EQ(p.kind(), Predicate::Kind::disjunction);
  EXPECT_EQ(p.children().size(), 2u);
  EXPECT_TRUE(bag_equal(evaluate(QueryPlan(plan::select(p, plan::table("t"))), db), instance(s, db)));
}

TEST(CompileFilter, EmptySketchIsFalse) {
  const Database db = crimes_micro();
  const Sketch empty = make_sketch(build_range_partition(lookup(db, "crimes"), year_ranges()), {false, false, false});
  EXPECT_EQ(compile_filter(empty), Predicate::literal(false));
}

TEST(SketchJson, RoundTrip) {
  const Sketch s = crimes_sketch(month_ranges());
  const Sketch back = sketch_from_json(sketch_to_json(s));
  EXPECT_EQ(back.bits, s.bits);
  EXPECT_EQ(back.size_rows, s.size_rows);
  EXPECT_EQ(back.ranges, s.ranges);
  EXPECT_EQ(back.captured_for.text, s.captured_for.text);
  EXPECT_EQ(bits_from_hex(bits_to_hex({true, false, true, true, false}), 5),
            (std::vector<bool>{true, false, true, true, false}));
}

TEST(Fingerprint, ConstantsAreSlots) {
  const Fingerprint a = fingerprint(highcrime_at(100));
  const Fingerprint b = fingerprint(highcrime_at(150));
  EXPECT_EQ(a.text, b.text);
  ASSERT_EQ(a.slots.size(), 1u);
  EXPECT_NE(a.slots[0].value, b.slots[0].value);
}

TEST(Reuse, IdenticalQuery) {
  const Database db = crimes_micro();
  SketchIndex index;
  index.insert(crimes_sketch(year_ranges()));
  EXPECT_TRUE(index.find_reusable(highcrime(), db).has_value());
}

TEST(Reuse, TighterThresholdIsReusableAndContained) {
  const Database db = crimes_micro();
  SketchIndex index;
  index.insert(crimes_sketch(year_ranges()));
  const QueryPlan q = highcrime_at(150);
  const auto hit = index.find_reusable(q, db);
  ASSERT_TRUE(hit.has_value());
  EXPECT_TRUE(contained(*hit, q, db));
  EXPECT_TRUE(bag_equal(evaluate(q, apply_sketch(*hit, db)), evaluate(q, db)));
}

TEST(Reuse, LooserThresholdIsNotReusable) {
  const Database db = crimes_micro();
  SketchIndex index;
  const Sketch s = crimes_sketch(year_ranges());
  index.insert(s);
  const QueryPlan q = highcrime_at(50);
  EXPECT_FALSE(index.find_reusable(q, db).has_value());
  // Reusing it anyway would miss provenance: g0 (year 2010, 88) now passes.
  EXPECT_FALSE(contained(s, q, db));
}

TEST(Reuse, PicksSmallestAndCountsUses) {
  const Database db = crimes_micro();
  SketchIndex index;
  index.insert(crimes_sketch(pid_ranges()));
  index.insert(crimes_sketch(year_ranges()));
  index.insert(crimes_sketch(month_ranges()));
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&] {
      for (int k = 0; k < 25; ++k) EXPECT_EQ(index.find_reusable(highcrime(), db)->attribute(), "year");
    });
  }
  for (auto& t : threads) t.join();
  std::int64_t uses = 0;
  for (const auto& e : index.entries()) {
    if (e.sketch.attribute() == "year") uses = e.uses;
  }
  EXPECT_EQ(uses, 100);
  const auto back = SketchIndex::from_json(index.to_json());
  EXPECT_EQ(back->size(), 3u);
}
