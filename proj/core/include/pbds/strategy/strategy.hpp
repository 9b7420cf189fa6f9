#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/estimator/size_estimator.hpp"
#include "pbds/relalg/plan.hpp"

namespace pbds {

enum class StrategyKind { rand_all, rand_rel_all, rand_gb, rand_pk, rand_agg, cb_opt_rel, cb_opt_gb, cb_opt };

std::string_view to_string(StrategyKind kind);
/// Accepts "CB_OPT_GB", "cb-opt-gb" and the like.
StrategyKind parse_strategy(std::string_view text);
bool is_cost_based(StrategyKind kind);
const std::vector<StrategyKind>& all_strategies();

struct Candidate {
  std::string attribute;
  bool group_by = false;
  bool aggregation_input = false;
  bool selection = false;
  bool join = false;
  bool primary_key = false;
  std::size_t distinct = 0;

  /// Used by the query in a group-by, selection, join condition, or as aggregation input.
  bool relevant() const { return group_by || aggregation_input || selection || join; }
};

/// Numeric attributes of one relation that are safe for every access and have at least as
/// many distinct values as fragments.
struct CandidateSet {
  std::string relation;
  std::vector<Candidate> attributes;  // schema order

  const Candidate* find(const std::string& attribute) const;
};

CandidateSet candidates(const QueryPlan& plan, const Database& db, const std::string& relation,
                        std::size_t fragment_count);

/// Candidate names the strategy chooses from, sorted.
std::vector<std::string> strategy_pool(const CandidateSet& candidates, StrategyKind strategy);

struct AttributeChoice {
  std::string attribute;
  /// Cost-based strategies only: estimates ordered by selectivity, ties by name.
  std::vector<SizeEstimate> ranking;
};

/// RAND_* picks uniformly from the pool with the seed; CB_* needs an estimator and returns the
/// smallest estimated sketch. Throws empty_pool.
AttributeChoice select_attribute(StrategyKind strategy, const CandidateSet& candidates, const QueryPlan& plan,
                                 const SizeEstimator* estimator, std::uint64_t seed);

/// Mean sketch size over a pool under a uniform pick.
double expected_random_size(const std::vector<std::int64_t>& sizes);

struct RankedQuery {
  std::vector<std::string> estimated_ranking;
  /// Attributes tied for the smallest actual sketch.
  std::set<std::string> true_best;
};

/// Fraction of queries with a true best attribute among the first k estimated.
double ranking_accuracy(const std::vector<RankedQuery>& queries, std::size_t k);

}  // namespace pbds
