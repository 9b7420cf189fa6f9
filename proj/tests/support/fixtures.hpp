#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbds/common/seed.hpp"
#include "pbds/partition/partition.hpp"
#include "pbds/relalg/plan.hpp"
#include "pbds/workbench/workload.hpp"

namespace pbds::testing {

/// The eight-row crimes table; row ids 0..7 in file order.
inline constexpr const char* crimes_csv =
    "pid,month,year,numcrimes\n"
    "3,1,2010,88\n"
    "4,1,2013,73\n"
    "4,1,2013,101\n"
    "8,6,2015,86\n"
    "8,6,2015,96\n"
    "2,7,2016,157\n"
    "7,2,2022,83\n"
    "7,9,2023,58\n";

Database crimes_micro();
/// SUM(numcrimes) AS totcrimes GROUP BY pid, month, year HAVING totcrimes >= 100.
QueryPlan highcrime();
RangeSet pid_ranges();
RangeSet month_ranges();
RangeSet year_ranges();

/// R(a, b, c) and S(d, e), integers in [-20, 20], at most `max_rows` rows each, multiplicities 1..2.
Database random_database(Rng& rng, int max_rows = 30);

/// Random plan over random_database relations using every operator kind.
PlanNode random_plan(Rng& rng, const Database& db, int depth);

/// Closed integer ranges covering [min, max] of the attribute, cut at random points.
RangeSet random_ranges(Rng& rng, const Relation& rel, const std::string& attribute);

/// Query templates for safety property runs over random_database.
enum class SafetyTemplate { spj, agh, topk, nested, join_agh, window, difference };
const std::vector<SafetyTemplate>& safety_templates();
std::string to_string(SafetyTemplate t);
PlanNode random_template_plan(Rng& rng, const Database& db, SafetyTemplate t);

/// Q-AGH workload spec over crimes_preset.
WorkloadSpec crimes_workload(std::size_t queries, std::uint64_t seed, std::size_t distinct_templates = 0);

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

}  // namespace pbds::testing
