#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "pbds/common/error.hpp"
#include "pbds/estimator/expectation.hpp"
#include "pbds/estimator/haas.hpp"
#include "pbds/estimator/size_estimator.hpp"
#include "pbds/sketch/sketch.hpp"

using namespace pbds;
using namespace pbds::testing;

namespace {

QueryPlan highcrime_at(std::int64_t c) {
  return QueryPlan(plan::select(compare("totcrimes", CompareOp::ge, c),
                                plan::aggregate(AggFunction::sum, "numcrimes", "totcrimes", {"pid", "month", "year"},
                                                plan::table("crimes"))));
}

struct Fixture {
  Database db = crimes_micro();
  SampleCache samples;
  PartitionCache partitions;

  Fixture() {
    for (const RangeSet& r : {pid_ranges(), month_ranges(), year_ranges()}) {
      partitions.insert(std::make_shared<const RangePartition>(build_range_partition(lookup(db, "crimes"), r)));
    }
  }

  SizeEstimator estimator(double theta) {
    EstimatorConfig config;
    config.fragment_count = 3;
    config.theta = theta;
    config.seed = 5;
    return SizeEstimator(db, config, samples, partitions);
  }
};

}  // namespace

TEST(SizeEstimator, FullSampleIsExact) {
  Fixture f;
  const auto result = f.estimator(1.0).estimate(highcrime(), {"pid", "month", "year"});
  ASSERT_EQ(result.estimates.size(), 3u);
  const std::vector<std::int64_t> sizes{8, 7, 5};
  const std::vector<double> sel{1.0, 0.875, 0.625};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(result.estimates[i].size, sizes[i]) << result.estimates[i].attribute;
    EXPECT_EQ(result.estimates[i].selectivity, sel[i]);
    EXPECT_NEAR(result.estimates[i].expected_size, static_cast<double>(sizes[i]), 1e-9);
  }
  EXPECT_EQ(result.groups.satisfied.size(), 3u);
  EXPECT_FALSE(result.sample_reused);
}

TEST(SizeEstimator, MatchesCapturedSizeAtFullRate) {
  Fixture f;
  for (const std::int64_t c : {60, 100, 160, 175}) {
    const QueryPlan q = highcrime_at(c);
    const auto result = f.estimator(1.0).estimate(q, {"pid", "month", "year"});
    for (const auto& e : result.estimates) {
      const auto part = f.partitions.get(lookup(f.db, "crimes"), e.attribute, 3);
      EXPECT_EQ(e.size, capture(q, f.db, *part).size_rows) << c << " " << e.attribute;
    }
  }
}

TEST(SizeEstimator, NoQualifyingGroupsGivesEmptySketch) {
  Fixture f;
  const auto result = f.estimator(1.0).estimate(highcrime_at(1000), {"year"});
  EXPECT_TRUE(result.groups.satisfied.empty());
  EXPECT_EQ(result.estimates.front().size, 0);
  EXPECT_EQ(result.estimates.front().expected_size, 0);
}

TEST(SizeEstimator, SampleIsReusedAcrossQueries) {
  Fixture f;
  const SizeEstimator e = f.estimator(0.5);
  EXPECT_FALSE(e.estimate(highcrime(), {"year"}).sample_reused);
  EXPECT_TRUE(e.estimate(highcrime_at(150), {"month"}).sample_reused);
  EXPECT_EQ(f.samples.size(), 1u);
}

TEST(SizeEstimator, BoundsBracketExpectation) {
  Fixture f;
  const auto result = f.estimator(0.5).estimate(highcrime(), {"pid", "month", "year"});
  for (const auto& e : result.estimates) {
    EXPECT_LE(e.lower, e.expected_size + 1e-9);
    EXPECT_LE(e.expected_size, e.upper + 1e-9);
    EXPECT_LE(e.upper, 8.0 + 1e-9);
  }
}

TEST(Haas, ConstantValuesHaveNoWidth) {
  const auto s = haas_interval(HaasAggregate::avg, {1, 1, 1}, {7, 7, 7}, 0.95);
  EXPECT_EQ(s.estimate, 7);
  EXPECT_EQ(s.epsilon, 0);
}

TEST(Haas, Quantile) {
  EXPECT_NEAR(z_alpha(0.95), 1.959964, 1e-6);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-12);
  EXPECT_THROW(z_alpha(1.0), Error);
}

TEST(Haas, SumOfFourValues) {
  const auto s = haas_interval(HaasAggregate::sum, {1, 1, 1, 1}, {1, 2, 3, 4}, 0.95);
  EXPECT_DOUBLE_EQ(s.t_n, 2.5);
  EXPECT_NEAR(s.t_n2, 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.epsilon, 1.959964 * std::sqrt(5.0 / 12.0), 1e-5);
  EXPECT_NEAR(s.epsilon, 1.26515, 1e-5);
}

TEST(Haas, AvgIgnoresNonQualifying) {
  const auto s = haas_interval(HaasAggregate::avg, {1, 0, 1, 0}, {2, 100, 4, -50}, 0.95);
  EXPECT_DOUBLE_EQ(s.estimate, 3.0);
  EXPECT_THROW(haas_interval(HaasAggregate::avg, {0, 0}, {1, 2}, 0.95), Error);
  EXPECT_THROW(haas_interval(HaasAggregate::sum, {1}, {1}, 0.95), Error);
}

TEST(Expectation, SingleGroup) {
  const auto p = fragment_probability({0.3});
  EXPECT_DOUBLE_EQ(p.point, 0.3);
  EXPECT_DOUBLE_EQ(p.lower, 0.3);
  EXPECT_DOUBLE_EQ(p.upper, 0.3);
}

TEST(Expectation, TwoIndependentHalves) {
  const auto p = fragment_probability({0.5, 0.5});
  EXPECT_DOUBLE_EQ(p.point, 0.75);
  EXPECT_DOUBLE_EQ(p.lower, 0.5);
  EXPECT_DOUBLE_EQ(p.upper, 1.0);
}

TEST(Expectation, FrechetBoundsOverFragments) {
  const auto b = expectation_bounds({{0.2, 0.3, 0.1}, {}, {1.0}}, {10, 4, 6});
  EXPECT_NEAR(b.expected, 10 * (1 - 0.8 * 0.7 * 0.9) + 6, 1e-12);
  EXPECT_NEAR(b.lower, 10 * 0.3 + 6, 1e-12);
  EXPECT_NEAR(b.upper, 10 * 0.6 + 6, 1e-12);
  EXPECT_THROW(expectation_bounds({{1.5}}, {1}), Error);
}

TEST(Expectation, Rse) {
  EXPECT_DOUBLE_EQ(rse(120, 100), 0.2);
  EXPECT_DOUBLE_EQ(rse(80, 100), 0.2);
  EXPECT_THROW(rse(1, 0), Error);
}
