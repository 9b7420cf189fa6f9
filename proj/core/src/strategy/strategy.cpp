#include "pbds/strategy/strategy.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "pbds/partition/partition.hpp"
#include "pbds/safety/dependencies.hpp"
#include "pbds/safety/safety.hpp"

namespace pbds {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::rand_all: return "RAND_ALL";
    case StrategyKind::rand_rel_all: return "RAND_REL_ALL";
    case StrategyKind::rand_gb: return "RAND_GB";
    case StrategyKind::rand_pk: return "RAND_PK";
    case StrategyKind::rand_agg: return "RAND_AGG";
    case StrategyKind::cb_opt_rel: return "CB_OPT_REL";
    case StrategyKind::cb_opt_gb: return "CB_OPT_GB";
    case StrategyKind::cb_opt: return "CB_OPT";
  }
  return "?";
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> kinds{StrategyKind::rand_all,   StrategyKind::rand_rel_all,
                                               StrategyKind::rand_gb,    StrategyKind::rand_pk,
                                               StrategyKind::rand_agg,   StrategyKind::cb_opt_rel,
                                               StrategyKind::cb_opt_gb,  StrategyKind::cb_opt};
  return kinds;
}

StrategyKind parse_strategy(std::string_view text) {
  std::string normalized;
  for (const char c : text) normalized += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const StrategyKind k : all_strategies()) {
    if (to_string(k) == normalized) return k;
  }
  fail(ErrorKind::invalid_argument, fmt::format("unknown strategy '{}'", text));
}

bool is_cost_based(StrategyKind kind) {
  return kind == StrategyKind::cb_opt || kind == StrategyKind::cb_opt_gb || kind == StrategyKind::cb_opt_rel;
}

const Candidate* CandidateSet::find(const std::string& attribute) const {
  const auto it = std::find_if(attributes.begin(), attributes.end(),
                               [&](const Candidate& c) { return c.attribute == attribute; });
  return it == attributes.end() ? nullptr : &*it;
}

CandidateSet candidates(const QueryPlan& plan, const Database& db, const std::string& relation,
                        std::size_t fragment_count) {
  const Relation& rel = lookup(db, relation);
  const AttributeRoles roles = attribute_roles(plan, db);
  const auto& pk = rel.schema().primary_key();
  CandidateSet out{relation, {}};
  for (const auto& a : rel.schema().attributes()) {
    if (!is_numeric(a.type)) continue;
    const BaseAttribute base{relation, a.name};
    Candidate c;
    c.attribute = a.name;
    c.group_by = roles.group_by.count(base) > 0;
    c.aggregation_input = roles.aggregation_input.count(base) > 0;
    c.selection = roles.selection.count(base) > 0;
    c.join = roles.join.count(base) > 0;
    c.primary_key = std::find(pk.begin(), pk.end(), a.name) != pk.end();
    c.distinct = distinct_count(rel, a.name);
    if (c.distinct < fragment_count) continue;
    if (!is_safe_attribute(plan, relation, a.name, db)) continue;
    out.attributes.push_back(std::move(c));
  }
  return out;
}

std::vector<std::string> strategy_pool(const CandidateSet& candidates, StrategyKind strategy) {
  std::vector<std::string> pool;
  for (const auto& c : candidates.attributes) {
    bool take = false;
    switch (strategy) {
      case StrategyKind::rand_all:
      case StrategyKind::cb_opt: take = true; break;
      case StrategyKind::rand_rel_all:
      case StrategyKind::cb_opt_rel: take = c.relevant(); break;
      case StrategyKind::rand_gb:
      case StrategyKind::cb_opt_gb: take = c.group_by; break;
      case StrategyKind::rand_pk: take = c.primary_key; break;
      case StrategyKind::rand_agg: take = c.aggregation_input; break;
    }
    if (take) pool.push_back(c.attribute);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

AttributeChoice select_attribute(StrategyKind strategy, const CandidateSet& candidates, const QueryPlan& plan,
                                 const SizeEstimator* estimator, std::uint64_t seed) {
  const auto pool = strategy_pool(candidates, strategy);
  if (pool.empty()) {
    fail(ErrorKind::empty_pool, fmt::format("no {} candidate on '{}'", to_string(strategy), candidates.relation));
  }
  if (!is_cost_based(strategy)) {
    Rng rng = make_rng(derive_seed(seed, to_string(strategy)));
    return {pool[uniform_index(rng, pool.size())], {}};
  }
  if (!estimator) fail(ErrorKind::invalid_argument, fmt::format("{} needs a sample-based estimator", to_string(strategy)));
  AttributeChoice choice;
  choice.ranking = estimator->estimate(plan, pool).estimates;
  std::stable_sort(choice.ranking.begin(), choice.ranking.end(), [](const SizeEstimate& a, const SizeEstimate& b) {
    if (a.selectivity != b.selectivity) return a.selectivity < b.selectivity;
    // Equal point estimates are common when most groups pass; the pass probabilities still separate them.
    if (a.expected_size != b.expected_size) return a.expected_size < b.expected_size;
    return a.attribute < b.attribute;
  });
  choice.attribute = choice.ranking.front().attribute;
  return choice;
}

double expected_random_size(const std::vector<std::int64_t>& sizes) {
  if (sizes.empty()) fail(ErrorKind::empty_pool, "expected size of an empty pool");
  double sum = 0;
  for (const auto s : sizes) sum += static_cast<double>(s);
  return sum / static_cast<double>(sizes.size());
}

double ranking_accuracy(const std::vector<RankedQuery>& queries, std::size_t k) {
  if (k < 1) fail(ErrorKind::invalid_argument, "ranking accuracy needs k >= 1");
  if (queries.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& q : queries) {
    const std::size_t n = std::min(k, q.estimated_ranking.size());
    const bool hit = std::any_of(q.estimated_ranking.begin(), q.estimated_ranking.begin() + static_cast<std::ptrdiff_t>(n),
                                 [&](const std::string& a) { return q.true_best.count(a) > 0; });
    hits += hit ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

}  // namespace pbds
