// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "pbds/common/error.hpp"
#include "pbds/estimator/estimator.hpp"
#include "pbds/estimator/expectation.hpp"
#include "pbds/estimator/haas.hpp"
#include "pbds/estimator/size_estimator.hpp"
#include "pbds/lineage/lineage.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/safety/bound.hpp"
#include "pbds/safety/safety.hpp"
#include "pbds/sampling/sample.hpp"
#include "pbds/sketch/sketch.hpp"
#include "pbds/strategy/strategy.hpp"
#include "pbds/workbench/generator.hpp"
#include "pbds/workbench/replay.hpp"
#include "pbds/workbench/report.hpp"
#include "pbds/workbench/workload.hpp"

using namespace pbds;
using namespace pbds::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Running example: captured sketches, selectivities and the cost-based choice.
Outcome running_example() {
  const Database db = crimes_micro();
  const QueryPlan q = highcrime();
  const Relation& crimes = lookup(db, "crimes");
  struct Case {
    RangeSet ranges;
    std::vector<bool> bits;
    double selectivity;
  };
  const std::vector<Case> cases{{pid_ranges(), {true, true, true}, 1.0},
                                {month_ranges(), {true, true, false}, 0.875},
                                {year_ranges(), {false, true, false}, 0.625}};
  std::string detail;
  bool ok = true;
  PartitionCache partitions;
  for (const auto& c : cases) {
    auto partition = std::make_shared<const RangePartition>(build_range_partition(crimes, c.ranges));
    const Sketch s = capture(q, db, *partition);
    const double sel = selectivity(s, db);
    ok = ok && s.bits == c.bits && sel == c.selectivity;
    detail += fmt::format("{}={} ", c.ranges.attribute(), sel);
    partitions.insert(partition);
  }
  SampleCache samples;
  EstimatorConfig config;
  config.theta = 1.0;
  config.fragment_count = 3;
  const SizeEstimator estimator(db, config, samples, partitions);
  const auto choice =
      select_attribute(StrategyKind::cb_opt_gb, candidates(q, db, "crimes", 3), q, &estimator, config.seed);
  ok = ok && choice.attribute == "year";
  return {ok, detail + "choice=" + choice.attribute};
}

// 2. Estimates from the one-row-per-group sample.
Outcome estimation_walkthrough() {
  const Database db = crimes_micro();
  const Relation& crimes = lookup(db, "crimes");
  const QueryShape shape = analyze_shape(highcrime(), db);
  // Keys are in sorted attribute order (month, pid, year); the sampled row of each group is
  // the one shown for it in the running example.
  struct Group {
    Tuple key;
    std::int64_t size;
    RowId sampled;
    double expected;
    bool satisfied;
  };
  const auto key = [](std::int64_t m, std::int64_t p, std::int64_t y) { return Tuple{m, p, y}; };
  const std::vector<Group> groups{{key(1, 3, 2010), 1, 0, 88, false},  {key(1, 4, 2013), 2, 2, 202, true},
                                  {key(6, 8, 2015), 2, 3, 172, true},  {key(7, 2, 2016), 1, 5, 157, true},
                                  {key(2, 7, 2022), 1, 6, 83, false},  {key(9, 7, 2023), 1, 7, 58, false}};
  StratifiedSample sample;
  sample.relation = "crimes";
  sample.attributes = {"month", "pid", "year"};
  sample.theta = 0.75;
  for (const auto& g : groups) sample.strata.push_back({g.key, g.size, {g.sampled}});
  std::sort(sample.strata.begin(), sample.strata.end(),
            [](const Stratum& a, const Stratum& b) { return compare_tuples(a.key, b.key) < 0; });

  const QueryEstimate est = estimate_query(shape, sample, crimes);
  bool ok = true;
  std::string detail;
  std::set<Tuple, TupleLess> expected_sat;
  for (const auto& g : groups) {
    const double got = estimate_of(est.groups, g.key).estimate;
    ok = ok && got == g.expected;
    detail += fmt::format("{} ", got);
    if (g.satisfied) expected_sat.insert(g.key);
  }
  const std::set<Tuple, TupleLess> sat(est.satisfied.begin(), est.satisfied.end());
  ok = ok && sat == expected_sat;
  return {ok, detail + fmt::format("satisfied={}", sat.size())};
}

// 3. Safe attributes yield accurate sketches that reproduce the full result.
Outcome dynamic_safety() {
  constexpr int wanted = 500;
  constexpr int max_attempts = 200000;
  int unsafe_broken = 0;
  bool ok = true;
  std::string detail;
  for (const SafetyTemplate t : safety_templates()) {
    Rng rng = make_rng(derive_seed(3, to_string(t)));
    int found = 0, equal = 0, attempts = 0;
    while (found < wanted && attempts < max_attempts) {
      ++attempts;
      const Database db = random_database(rng);
      const QueryPlan q(random_template_plan(rng, db, t));
      const std::string attribute = std::vector<std::string>{"a", "b", "c"}[uniform_index(rng, 3)];
      const Relation& r = lookup(db, "R");
      const RangePartition partition = build_range_partition(r, random_ranges(rng, r, attribute));
      const Sketch s = capture(q, db, partition);
      const bool same = bag_equal(evaluate(q, apply_sketch(s, db)), evaluate(q, db));
      if (!is_safe_attribute(q, "R", attribute, db)) {
        // Not part of the criterion; shows the check can fail.
        if (!same) ++unsafe_broken;
        continue;
      }
      ++found;
      if (same) ++equal;
    }
    ok = ok && found == wanted && equal == wanted;
    detail += fmt::format("{}={}/{} ", to_string(t), equal, found);
  }
  return {ok, detail + fmt::format("(unsafe triples that broke: {})", unsafe_broken)};
}

// 4. monotonicity_one against the case split, written out cell by cell.
Outcome monotonicity_table() {
  const std::vector<AggFunction> fs{AggFunction::sum, AggFunction::count, AggFunction::min, AggFunction::max,
                                    AggFunction::avg};
  const std::vector<CompareOp> ops{CompareOp::lt, CompareOp::le, CompareOp::ge, CompareOp::gt};
  const std::vector<std::pair<std::string, Bound>> bounds{
      {"nonneg", Bound::at_least(0)}, {"neg", Bound::at_most(-1)}, {"unknown", Bound::unknown()}};
  // Safe cells: COUNT and MAX with > or >=; MIN with < or <=; SUM with > or >= over
  // nonnegative input and with < or <= over negative input.
  const auto expected = [](AggFunction f, CompareOp op, const std::string& b) {
    const bool up = op == CompareOp::gt || op == CompareOp::ge;
    switch (f) {
      case AggFunction::count:
      case AggFunction::max: return up;
      case AggFunction::min: return !up;
      case AggFunction::sum: return (up && b == "nonneg") || (!up && b == "neg");
      case AggFunction::avg: return false;
    }
    return false;
  };
  int cells = 0, matched = 0;
  for (const auto f : fs) {
    for (const auto op : ops) {
      for (const auto& [name, bound] : bounds) {
        ++cells;
        if (monotonicity_one(f, op, bound) == expected(f, op, name)) ++matched;
      }
    }
  }
  return {cells == 60 && matched == 60, fmt::format("{}/{} cells", matched, cells)};
}

// 5. Static min/max bounds bracket the evaluated extremes.
Outcome bound_soundness() {
  Rng rng = make_rng(5);
  int plans = 0, checks = 0, violations = 0;
  std::string first;
  while (plans < 1000) {
    const Database db = random_database(rng, 30);
    PlanNode root;
    try {
      root = random_plan(rng, db, 1 + static_cast<int>(uniform_index(rng, 4)));
      infer_schema(root, db);
    } catch (const Error&) {
      continue;  // e.g. a join on text; regenerate
    }
    const QueryPlan q(root);
    ++plans;
    const Relation out = evaluate(q, db);
    for (const auto& a : out.schema().attributes()) {
      if (!is_numeric(a.type) || out.empty()) continue;
      const std::size_t col = out.schema().require(a.name);
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& row : out.rows()) {
        lo = std::min(lo, as_double(row.values[col]));
        hi = std::max(hi, as_double(row.values[col]));
      }
      ++checks;
      const Bound mn = min_value(q, a.name, db);
      const Bound mx = max_value(q, a.name, db);
      if (!mn.contains(lo) || !mx.contains(hi)) {
        ++violations;
        if (first.empty()) first = fmt::format(" first: {} on {}", a.name, q.to_string());
      }
    }
  }
  return {violations == 0, fmt::format("{} plans, {} attribute checks, {} violations{}", plans, checks, violations, first)};
}

EstimatorConfig desk_config(double theta) {
  EstimatorConfig c;
  c.theta = theta;
  c.fragment_count = 100;
  c.seed = 17;
  return c;
}

/// The first `count` generated queries that have at least one candidate attribute.
std::vector<QueryPlan> sketchable_workload(const Database& db, std::size_t count, std::uint64_t seed,
                                           std::size_t fragments) {
  std::vector<QueryPlan> out;
  for (auto& q : generate_workload(crimes_workload(3 * count, seed), db)) {
    if (out.size() == count) break;
    if (!strategy_pool(candidates(q, db, "crimes", fragments), StrategyKind::cb_opt).empty()) out.push_back(std::move(q));
  }
  return out;
}

// 6. A full sample estimates every sketch size exactly.
Outcome full_sample_exactness() {
  const Database db = crimes_preset(10000, 6);
  const auto workload = sketchable_workload(db, 100, 6, 100);
  const auto records = evaluate_ranking(workload, db, desk_config(1.0));
  std::size_t pairs = 0, exact = 0;
  for (const auto& r : records) {
    for (const auto& e : r.ranking) {
      ++pairs;
      if (e.size == r.actual.at(e.attribute)) ++exact;
    }
  }
  return {workload.size() == 100 && records.size() == workload.size() && pairs > 0 && exact == pairs,
          fmt::format("{} queries, {}/{} (query, attribute) pairs exact", records.size(), exact, pairs)};
}

// 7. Estimation quality at 10% sampling.
Outcome desk_scale() {
  const Database db = crimes_preset(100000, 7);
  const auto workload = sketchable_workload(db, 100, 7, 100);
  const RankingSummary s = summarize_ranking(evaluate_ranking(workload, db, desk_config(0.10)));
  const double med = s.median_rse.value_or(INFINITY);
  return {s.queries == 100 && med <= 0.20 && s.top1 >= 0.85 && s.top3 >= 0.95,
          fmt::format("queries={} median_rse={:.4f} top1={:.2f} top2={:.2f} top3={:.2f}", s.queries, med, s.top1,
                      s.top2, s.top3)};
}

// 8. Unbiasedness, interval shrinkage and the AVG variance formula.
Outcome estimator_statistics() {
  // Ten groups of 500 rows with values uniform in [0, 100].
  Relation rel(Schema("t", {{"g", DataType::integer}, {"v", DataType::integer}}));
  Rng data = make_rng(8);
  std::vector<double> truth(10, 0);
  for (std::int64_t g = 0; g < 10; ++g) {
    for (int i = 0; i < 500; ++i) {
      const auto v = uniform_int(data, 0, 100);
      rel.add_row({g, v});
      truth[g] += static_cast<double>(v);
    }
  }
  AggregateLevel level;
  level.function = AggFunction::sum;
  level.input = "v";
  level.output = "s";
  level.group_by = {"g"};
  constexpr int runs = 500;
  std::vector<double> sum(10, 0), sum_sq(10, 0);
  for (int r = 0; r < runs; ++r) {
    const auto sample = stratified_sample(rel, {"g"}, 0.1, derive_seed(8, static_cast<std::uint64_t>(r)));
    const auto est = estimate_groups(sample, rel, level, std::nullopt, {1, 0});
    for (const auto& e : est) {
      const auto g = std::get<std::int64_t>(e.key[0]);
      sum[g] += e.estimate;
      sum_sq[g] += e.estimate * e.estimate;
    }
  }
  bool unbiased = true;
  double worst = 0;
  for (int g = 0; g < 10; ++g) {
    const double mean = sum[g] / runs;
    const double sd = std::sqrt(std::max(0.0, sum_sq[g] / runs - mean * mean));
    const double err = std::abs(mean - truth[g]);
    worst = std::max(worst, err / truth[g]);
    unbiased = unbiased && err <= 0.02 * truth[g] && err <= 3 * sd / std::sqrt(double(runs));
  }

  // Half-width ratio for n and 4n draws from one population.
  Rng pop = make_rng(88);
  const auto draw = [&](std::size_t n) {
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = uniform_unit(pop) < 0.7 ? 1.0 : 0.0;
      v[i] = static_cast<double>(uniform_int(pop, 0, 100));
    }
    return haas_interval(HaasAggregate::sum, u, v, 0.95).epsilon;
  };
  const double e1 = draw(2000);
  const double e4 = draw(8000);
  const double ratio = e1 / e4;
  const bool halves = std::abs(ratio - 2.0) <= 0.2;

  // The AVG variance formula against the variance of the linearized ratio u*v - R*u.
  const std::vector<double> u{1, 0, 1, 1, 0, 1};
  const std::vector<double> v{12, 7, 3, 25, 40, 9};
  const HaasStats h = haas_interval(HaasAggregate::avg, u, v, 0.95);
  double su = 0, suv = 0;
  for (int i = 0; i < 6; ++i) {
    su += u[i];
    suv += u[i] * v[i];
  }
  const double r = suv / su;
  double direct = 0;
  for (int i = 0; i < 6; ++i) direct += (u[i] * v[i] - r * u[i]) * (u[i] * v[i] - r * u[i]);
  direct = direct / 5 / ((su / 6) * (su / 6));
  const bool avg_ok = std::abs(h.variance - direct) <= 1e-9;

  return {unbiased && halves && avg_ok, fmt::format("worst bias={:.4f} eps ratio={:.3f} avg var={:.9f} vs {:.9f}",
                                                    worst, ratio, h.variance, direct)};
}

// 9. Union probability of dependent groups lies in the Fréchet bounds.
Outcome frechet_sandwich() {
  Rng rng = make_rng(9);
  int violations = 0;
  double worst_independent = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + uniform_index(rng, 4);
    const std::size_t outcomes = std::size_t{1} << k;
    std::vector<double> joint(outcomes);
    double total = 0;
    for (auto& p : joint) total += (p = uniform_unit(rng) * (uniform_index(rng, 3) == 0 ? 0 : 1));
    if (total == 0) joint[outcomes - 1] = total = 1;
    for (auto& p : joint) p /= total;
    std::vector<double> marginal(k, 0);
    for (std::size_t o = 0; o < outcomes; ++o) {
      for (std::size_t g = 0; g < k; ++g) {
        if (o >> g & 1) marginal[g] += joint[o];
      }
    }
    const double union_p = 1 - joint[0];
    const ProbabilityInterval iv = fragment_probability(marginal);
    const double eps = 1e-12;
    if (union_p < iv.lower - eps || union_p > iv.upper + eps) ++violations;
    if (std::abs(iv.lower - *std::max_element(marginal.begin(), marginal.end())) > eps) ++violations;
    if (std::abs(iv.upper - std::min(1.0, std::accumulate(marginal.begin(), marginal.end(), 0.0))) > eps) ++violations;

    // Independent groups with the same marginals: the exhaustive union is the point value.
    double indep_union = 0;
    for (std::size_t o = 1; o < outcomes; ++o) {
      double p = 1;
      for (std::size_t g = 0; g < k; ++g) p *= (o >> g & 1) ? marginal[g] : 1 - marginal[g];
      indep_union += p;
    }
    worst_independent = std::max(worst_independent, std::abs(indep_union - iv.point));
  }
  return {violations == 0 && worst_independent <= 1e-12,
          fmt::format("violations={} max independence gap={:.2e}", violations, worst_independent)};
}

// 10 and 11. End-to-end replay per strategy.
std::vector<RunReport> replays;

const std::vector<RunReport>& end_to_end_runs() {
  if (replays.empty()) {
    const Database db = crimes_preset(50000, 10);
    const auto workload = generate_workload(crimes_workload(200, 10, 40), db);
    for (const StrategyKind k : {StrategyKind::cb_opt, StrategyKind::cb_opt_gb, StrategyKind::rand_gb,
                                 StrategyKind::rand_pk}) {
      ReplayConfig config;
      config.strategy = k;
      config.estimator = desk_config(0.05);
      replays.push_back(run_end_to_end(workload, db, config));
    }
  }
  return replays;
}

Outcome end_to_end_ordering() {
  const auto& runs = end_to_end_runs();
  std::vector<std::int64_t> totals;
  bool correct = true;
  std::string detail;
  for (const auto& r : runs) {
    const ReplaySummary s = summarize(r);
    totals.push_back(s.rows_scanned);
    correct = correct && s.correct;
    detail += fmt::format("{}={} ", s.strategy, s.rows_scanned);
  }
  bool ordered = true;
  for (std::size_t i = 0; i + 1 < totals.size(); ++i) {
    ordered = ordered && static_cast<double>(totals[i]) <= 1.02 * static_cast<double>(totals[i + 1]);
  }
  return {ordered && correct, detail + (correct ? "results equal" : "RESULT MISMATCH")};
}

Outcome reuse_soundness() {
  std::size_t reuses = 0, contained = 0;
  for (const auto& r : end_to_end_runs()) {
    for (const auto& q : r.queries) {
      if (!q.reused) continue;
      ++reuses;
      if (q.contained) ++contained;
    }
  }
  return {reuses > 0 && contained == reuses, fmt::format("{}/{} reuses contained", contained, reuses)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"running example", running_example},
      {"estimation walk-through", estimation_walkthrough},
      {"dynamic safety", dynamic_safety},
      {"monotonicity table", monotonicity_table},
      {"bound soundness", bound_soundness},
      {"full-sample exactness", full_sample_exactness},
      {"desk-scale estimation", desk_scale},
      {"estimator statistics", estimator_statistics},
      {"frechet sandwich", frechet_sandwich},
      {"end-to-end ordering", end_to_end_ordering},
      {"reuse soundness", reuse_soundness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::cout << fmt::format("{} {:2} {} ({:.1f}s): {}", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                             o.detail)
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
