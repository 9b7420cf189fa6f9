#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "pbds/common/error.hpp"
#include "pbds/partition/partition.hpp"

using namespace pbds;
using namespace pbds::testing;

namespace {

Relation sequence(std::int64_t n) {
  Relation r(Schema("t", {{"v", DataType::integer}}));
  for (std::int64_t i = 1; i <= n; ++i) r.add_row({i});
  return r;
}

}  // namespace

TEST(RangePartition, CrimesFragmentSizes) {
  const Database db = crimes_micro();
  const Relation& crimes = lookup(db, "crimes");
  EXPECT_EQ(build_range_partition(crimes, year_ranges()).fragment_sizes(), (std::vector<std::int64_t>{1, 5, 2}));
  EXPECT_EQ(build_range_partition(crimes, pid_ranges()).fragment_sizes(), (std::vector<std::int64_t>{2, 2, 4}));
  EXPECT_EQ(build_range_partition(crimes, month_ranges()).fragment_sizes(), (std::vector<std::int64_t>{4, 3, 1}));
}

TEST(RangePartition, SingleRangeHoldsEverything) {
  const Database db = crimes_micro();
  const Relation& crimes = lookup(db, "crimes");
  const auto p = build_range_partition(crimes, RangeSet("year", {{2000, 2030}}));
  EXPECT_EQ(p.fragment_sizes(), std::vector<std::int64_t>{8});
}

TEST(RangePartition, FragmentOfRangeBoundaries) {
  const auto ranges = year_ranges();
  EXPECT_EQ(fragment_of(ranges, Value(std::int64_t{2013})), 1u);
  EXPECT_EQ(fragment_of(ranges, Value(std::int64_t{2010})), 0u);
  EXPECT_EQ(fragment_of(ranges, Value(std::int64_t{2024})), 2u);
  try {
    fragment_of(ranges, Value(std::int64_t{2030}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::uncovered_value);
  }
}

TEST(RangePartition, OverlapIsRejected) {
  try {
    RangeSet("x", {{1, 5}, {5, 9}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::overlapping_ranges);
  }
}

TEST(RangePartition, RandomMembershipMatchesScan) {
  Rng rng = make_rng(178);
  for (int i = 0; i < 200; ++i) {
    const Database db = random_database(rng, 30);
    const Relation& r = lookup(db, "R");
    const RangeSet ranges = i % 2 ? random_ranges(rng, r, "b") : equi_width_ranges(r, "b", 1 + i % 5);
    const auto p = build_range_partition(r, ranges);
    const std::size_t col = r.schema().require("b");
    std::vector<std::int64_t> sizes(ranges.size(), 0);
    for (const auto& row : r.rows()) {
      const double v = as_double(row.values[col]);
      std::size_t hit = ranges.size();
      for (std::size_t k = 0; k < ranges.size(); ++k) {
        if (ranges[k].lo <= v && v <= ranges[k].hi) hit = k;
      }
      ASSERT_LT(hit, ranges.size());
      EXPECT_EQ(p.fragment_of_row(row.id), hit);
      sizes[hit] += row.multiplicity;
    }
    EXPECT_EQ(p.fragment_sizes(), sizes);
  }
}

TEST(EquiDepth, OneRangeCoversDomain) {
  const auto r = equi_depth_ranges(sequence(100), "v", 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r.covers(1));
  EXPECT_TRUE(r.covers(100));
}

TEST(EquiDepth, UniformValuesSplitEvenly) {
  const Relation t = sequence(100);
  EXPECT_EQ(build_range_partition(t, equi_depth_ranges(t, "v", 4)).fragment_sizes(),
            (std::vector<std::int64_t>{25, 25, 25, 25}));
}

TEST(EquiDepth, DistinctCountGivesOneValuePerRange) {
  const Database db = crimes_micro();
  const Relation& crimes = lookup(db, "crimes");
  const std::size_t k = distinct_count(crimes, "year");
  const auto p = build_range_partition(crimes, equi_depth_ranges(crimes, "year", k));
  EXPECT_EQ(p.fragment_count(), k);
  EXPECT_EQ(p.fragment_sizes(), (std::vector<std::int64_t>{1, 2, 2, 1, 1, 1}));
}

TEST(RangeSetJson, RoundTrip) {
  EXPECT_EQ(range_set_from_json(range_set_to_json(year_ranges())), year_ranges());
}

TEST(HashPartition, DeterministicAndInRange) {
  const Database db = crimes_micro();
  const Relation& crimes = lookup(db, "crimes");
  const auto a = build_hash_partition(crimes, "pid", 4, 9);
  const auto b = build_hash_partition(crimes, "pid", 4, 9);
  EXPECT_EQ(a.fragments, b.fragments);
  std::int64_t total = 0;
  for (auto s : a.fragment_sizes) total += s;
  EXPECT_EQ(total, 8);
  for (int v = 0; v < 100; ++v) {
    const auto h = hash_bucket(Value(std::int64_t{v}), 4, 9);
    EXPECT_GE(h, 1u);
    EXPECT_LE(h, 4u);
  }
}
