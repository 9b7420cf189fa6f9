#include "pbds/workbench/replay.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "pbds/lineage/lineage.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/sketch/sketch_index.hpp"

namespace pbds {

bool RunReport::correct() const {
  return std::all_of(queries.begin(), queries.end(),
                     [](const QueryRecord& q) { return q.result_equal && q.contained; });
}

namespace {

std::string sketched_relation(const QueryPlan& plan, const Database& db) {
  try {
    return analyze_shape(plan, db).fact;
  } catch (const Error&) {
    return plan.node(plan.table_accesses().front()).relation;
  }
}

bool contained(const Provenance& prov, const Sketch& sketch, const Database& db) {
  const Relation inst = instance(sketch, db);
  std::vector<RowId> ids;
  for (const auto& row : inst.rows()) ids.push_back(row.id);
  std::vector<RowId> needed = prov.of(sketch.relation);
  std::sort(ids.begin(), ids.end());
  std::sort(needed.begin(), needed.end());
  return std::includes(ids.begin(), ids.end(), needed.begin(), needed.end());
}

}  // namespace

RunReport run_end_to_end(const std::vector<QueryPlan>& workload, const Database& db, const ReplayConfig& config) {
  RunReport report;
  report.strategy = std::string(to_string(config.strategy));
  SketchIndex index;
  SampleCache samples;
  PartitionCache partitions;
  const SizeEstimator estimator(db, config.estimator, samples, partitions);
  std::int64_t cumulative = 0;

  for (std::size_t i = 0; i < workload.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const QueryPlan& plan = workload[i];
    QueryRecord rec;
    rec.index = i;
    rec.relation = sketched_relation(plan, db);
    const Relation& rel = lookup(db, rec.relation);
    rec.relation_rows = rel.size();

    if (const auto hit = index.find_reusable(plan, db)) {
      rec.reused = rec.sketched = true;
      rec.attribute = hit->attribute();
      rec.actual_size = hit->size_rows;
      rec.rows_scanned = hit->size_rows;
      if (config.verify) {
        rec.result_equal = bag_equal(evaluate(plan, apply_sketch(*hit, db)), evaluate(plan, db));
        rec.contained = contained(lineage(plan, db), *hit, db);
      }
    } else {
      rec.rows_scanned = rec.relation_rows;
      try {
        const CandidateSet cands = candidates(plan, db, rec.relation, config.estimator.fragment_count);
        const bool cost_based = is_cost_based(config.strategy);
        const std::size_t samples_before = samples.size();
        const AttributeChoice choice = select_attribute(config.strategy, cands, plan, cost_based ? &estimator : nullptr,
                                                        derive_seed(config.estimator.seed, i));
        rec.attribute = choice.attribute;
        for (const auto& e : choice.ranking) {
          if (e.attribute == choice.attribute) rec.estimated_size = e.size;
        }
        if (cost_based && samples.size() > samples_before) {
          // A new sample reads the whole grouped input once.
          const QueryShape shape = analyze_shape(plan, db);
          if (const auto sample = samples.lookup(shape.input_name(), shape.inner.group_by)) {
            for (const auto& stratum : sample->strata) rec.sample_rows += static_cast<std::int64_t>(stratum.size);
          }
        }
        const auto partition = partitions.get(rel, choice.attribute, config.estimator.fragment_count);
        Sketch sketch = capture(plan, db, *partition);
        rec.sketched = true;
        rec.actual_size = sketch.size_rows;
        if (rec.estimated_size >= 0 && rec.actual_size > 0) {
          rec.rse = std::abs(static_cast<double>(rec.estimated_size - rec.actual_size)) / static_cast<double>(rec.actual_size);
        }
        if (config.verify) rec.result_equal = bag_equal(evaluate(plan, apply_sketch(sketch, db)), evaluate(plan, db));
        index.insert(std::move(sketch));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::empty_pool && e.kind() != ErrorKind::unsupported_template) throw;
        rec.flag = std::string(to_string(e.kind()));
      }
    }
    cumulative += rec.rows_scanned;
    rec.cumulative_rows = cumulative;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.queries.push_back(std::move(rec));
  }
  return report;
}

std::vector<RankingRecord> evaluate_ranking(const std::vector<QueryPlan>& workload, const Database& db,
                                            const EstimatorConfig& config) {
  SampleCache samples;
  PartitionCache partitions;
  const SizeEstimator estimator(db, config, samples, partitions);
  std::vector<RankingRecord> out;
  for (std::size_t i = 0; i < workload.size(); ++i) {
    const QueryPlan& plan = workload[i];
    const std::string relation = sketched_relation(plan, db);
    const Relation& rel = lookup(db, relation);
    const CandidateSet cands = candidates(plan, db, relation, config.fragment_count);
    const auto pool = strategy_pool(cands, StrategyKind::cb_opt);
    if (pool.empty()) continue;

    RankingRecord rec;
    rec.index = i;
    rec.relation_rows = rel.size();
    rec.ranking = select_attribute(StrategyKind::cb_opt, cands, plan, &estimator, config.seed).ranking;
    const Provenance prov = lineage(plan, db);
    std::int64_t best = -1;
    for (const auto& a : pool) {
      const std::int64_t size = capture(prov, *partitions.get(rel, a, config.fragment_count)).size_rows;
      rec.actual.emplace(a, size);
      if (best < 0 || size < best) best = size;
    }
    for (const auto& [a, size] : rec.actual) {
      if (size == best) rec.ranked.true_best.insert(a);
    }
    for (const auto& e : rec.ranking) rec.ranked.estimated_ranking.push_back(e.attribute);

    const auto relative = [&](std::int64_t size) {
      return static_cast<double>(size) / static_cast<double>(std::max<std::int64_t>(1, rec.relation_rows));
    };
    for (const StrategyKind k : all_strategies()) {
      const auto kpool = strategy_pool(cands, k);
      if (kpool.empty()) continue;
      if (is_cost_based(k)) {
        const auto it = std::find_if(rec.ranking.begin(), rec.ranking.end(), [&](const SizeEstimate& e) {
          return std::find(kpool.begin(), kpool.end(), e.attribute) != kpool.end();
        });
        rec.relative_size.emplace(to_string(k), relative(rec.actual.at(it->attribute)));
      } else {
        std::vector<std::int64_t> sizes;
        for (const auto& a : kpool) sizes.push_back(rec.actual.at(a));
        rec.relative_size.emplace(to_string(k), expected_random_size(sizes) /
                                                    static_cast<double>(std::max<std::int64_t>(1, rec.relation_rows)));
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pbds
