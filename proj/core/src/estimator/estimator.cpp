#include "pbds/estimator/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"

namespace pbds {

namespace {

std::vector<std::string> sorted(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

/// Schema of an estimated group row: sorted group-by attributes, then the aggregate.
Schema level_schema(const Schema& input, const AggregateLevel& level) {
  std::vector<Attribute> attributes;
  for (const auto& g : sorted(level.group_by)) attributes.push_back(input.attribute(g));
  attributes.push_back({level.output, level.function == AggFunction::count ? DataType::integer : DataType::real});
  return Schema("", std::move(attributes));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(estimate ◇ c) when the estimate is normal with the given variance.
double atom_probability(double estimate, double variance, CompareOp op, double c) {
  if (variance <= 0) return holds(op, estimate < c ? -1 : (estimate > c ? 1 : 0)) ? 1.0 : 0.0;
  const double z = (estimate - c) / std::sqrt(variance);
  switch (op) {
    case CompareOp::gt:
    case CompareOp::ge: return normal_cdf(z);
    case CompareOp::lt:
    case CompareOp::le: return 1.0 - normal_cdf(z);
    case CompareOp::eq: return 0.0;
  }
  return 0.0;
}

void flatten(const Predicate& p, std::vector<const Predicate*>& atoms) {
  if (p.kind() == Predicate::Kind::conjunction) {
    for (const auto& c : p.children()) flatten(c, atoms);
  } else {
    atoms.push_back(&p);
  }
}

Tuple row_of(const GroupEstimate& g) {
  Tuple t = g.key;
  t.emplace_back(g.estimate);
  return t;
}

/// Product over conjuncts: comparisons of the aggregate with a constant use the normal model,
/// everything else is decided on the point estimate.
double pass_probability(const GroupEstimate& g, const Schema& schema, const AggregateLevel& level) {
  if (!g.defined) return 0.0;
  if (!level.having) return 1.0;
  std::vector<const Predicate*> atoms;
  flatten(*level.having, atoms);
  const Tuple row = row_of(g);
  double p = 1.0;
  for (const Predicate* atom : atoms) {
    if (atom->kind() == Predicate::Kind::comparison) {
      const Expression& l = atom->lhs();
      const Expression& r = atom->rhs();
      if (l.is_attribute() && l.name() == level.output && r.is_constant()) {
        p *= atom_probability(g.estimate, g.variance, atom->op(), as_double(r.value()));
        continue;
      }
      if (r.is_attribute() && r.name() == level.output && l.is_constant()) {
        p *= atom_probability(g.estimate, g.variance, mirrored(atom->op()), as_double(l.value()));
        continue;
      }
    }
    if (!BoundPredicate(*atom, schema).evaluate(row)) return 0.0;
  }
  return p;
}

}  // namespace

std::vector<GroupEstimate> estimate_groups(const StratifiedSample& sample, const Relation& input,
                                           const AggregateLevel& level, const std::optional<Predicate>& where,
                                           const EstimationOptions& options) {
  if (sample.attributes != sorted(level.group_by)) {
    fail(ErrorKind::invalid_argument,
         fmt::format("sample strata on ({}) do not match group-by ({})", fmt::join(sample.attributes, ","),
                     fmt::join(level.group_by, ",")));
  }
  if (level.function == AggFunction::min || level.function == AggFunction::max) {
    fail(ErrorKind::unsupported_template, fmt::format("{} is not estimated from samples", to_string(level.function)));
  }
  std::optional<std::size_t> column;
  if (!level.input.empty()) {
    column = input.schema().require(level.input);
    if (!is_numeric(input.schema().attributes()[*column].type)) {
      fail(ErrorKind::type_mismatch, fmt::format("aggregation over text attribute '{}'", level.input));
    }
  }
  std::optional<BoundPredicate> filter;
  if (where) filter.emplace(*where, input.schema());

  std::unordered_map<RowId, const Row*> by_id;
  by_id.reserve(input.row_count());
  for (const auto& row : input.rows()) by_id.emplace(row.id, &row);

  const Schema schema = level_schema(input.schema(), level);
  const std::uint64_t boot_seed = derive_seed(options.seed, "bootstrap");
  std::vector<GroupEstimate> out;
  out.reserve(sample.strata.size());
  for (std::size_t i = 0; i < sample.strata.size(); ++i) {
    const Stratum& stratum = sample.strata[i];
    GroupEstimate g;
    g.key = stratum.key;
    g.stratum_size = stratum.size;
    g.sample_size = stratum.sample_size();

    std::vector<double> weighted;  // u(t) * v(t)
    std::vector<double> indicator;  // u(t)
    std::vector<double> qualifying;
    weighted.reserve(stratum.rows.size());
    indicator.reserve(stratum.rows.size());
    for (const RowId id : stratum.rows) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) fail(ErrorKind::unknown_id, fmt::format("sampled row {} not in '{}'", id, sample.relation));
      const Row& row = *it->second;
      const bool u = !filter || filter->evaluate(row.values);
      const double v = column ? as_double(row.values[*column]) : 1.0;
      weighted.push_back(u ? v : 0.0);
      indicator.push_back(u ? 1.0 : 0.0);
      if (u) qualifying.push_back(v);
    }
    g.qualifying = static_cast<std::int64_t>(qualifying.size());
    const double scale = static_cast<double>(g.stratum_size) / static_cast<double>(g.sample_size);
    const std::uint64_t seed = derive_seed(boot_seed, static_cast<std::uint64_t>(i));
    // Strata are sampled without replacement; a fully sampled stratum has no variance.
    const double fpc = std::max(0.0, 1.0 - 1.0 / scale);

    if (level.function == AggFunction::avg) {
      if (qualifying.empty()) {
        g.defined = false;
        g.estimate = std::numeric_limits<double>::quiet_NaN();
      } else {
        g.estimate = std::accumulate(qualifying.begin(), qualifying.end(), 0.0) / static_cast<double>(qualifying.size());
        g.variance = bootstrap_mean(qualifying, options.bootstrap, seed).variance * fpc;
      }
    } else {
      if (level.function == AggFunction::count) weighted = std::move(indicator);
      // Point estimate straight from the sample sum, so a full sample reproduces the exact aggregate.
      g.estimate = std::accumulate(weighted.begin(), weighted.end(), 0.0) * scale;
      const double var = bootstrap_mean(weighted, options.bootstrap, seed).variance;
      g.variance = var * fpc * static_cast<double>(g.stratum_size) * static_cast<double>(g.stratum_size);
    }
    out.push_back(std::move(g));
  }
  for (auto& g : out) g.probability = pass_probability(g, schema, level);
  return out;
}

std::vector<Tuple> satisfied_groups(const std::vector<GroupEstimate>& estimates, const Schema& input_schema,
                                    const AggregateLevel& level) {
  const Schema schema = level_schema(input_schema, level);
  std::optional<BoundPredicate> having;
  if (level.having) having.emplace(*level.having, schema);
  std::vector<Tuple> out;
  for (const auto& g : estimates) {
    if (!g.defined) continue;
    if (!having || having->evaluate(row_of(g))) out.push_back(g.key);
  }
  return out;
}

const GroupEstimate& estimate_of(const std::vector<GroupEstimate>& estimates, const Tuple& key) {
  const auto it = std::find_if(estimates.begin(), estimates.end(),
                               [&](const GroupEstimate& g) { return compare_tuples(g.key, key) == 0; });
  if (it == estimates.end()) fail(ErrorKind::missing_stratum, fmt::format("no stratum for group {}", to_string(key)));
  return *it;
}

QueryEstimate estimate_query(const QueryShape& shape, const StratifiedSample& sample, const Relation& input,
                             const EstimationOptions& options) {
  QueryEstimate out;
  out.groups = estimate_groups(sample, input, shape.inner, shape.where, options);
  out.satisfied = satisfied_groups(out.groups, input.schema(), shape.inner);
  if (!shape.outer) {
    for (const auto& g : out.groups) out.probabilities.emplace(g.key, g.probability);
    return out;
  }

  // Outer aggregation over the estimated inner rows (sorted inner group-by attributes + aggregate).
  const AggregateLevel& outer = *shape.outer;
  const Schema inner_schema = level_schema(input.schema(), shape.inner);
  std::vector<std::size_t> outer_columns;
  for (const auto& g : sorted(outer.group_by)) outer_columns.push_back(inner_schema.require(g));
  std::optional<std::size_t> input_column;
  if (!outer.input.empty()) input_column = inner_schema.require(outer.input);

  struct Accumulator {
    double sum = 0;
    std::int64_t count = 0;
  };
  std::map<Tuple, Accumulator, TupleLess> groups;
  std::vector<std::pair<Tuple, Tuple>> members;  // (inner key, outer key)
  for (const auto& key : out.satisfied) {
    const Tuple row = row_of(estimate_of(out.groups, key));
    Tuple outer_key;
    for (const std::size_t c : outer_columns) outer_key.push_back(row[c]);
    auto& acc = groups[outer_key];
    acc.sum += input_column ? as_double(row[*input_column]) : 1.0;
    acc.count += 1;
    members.emplace_back(key, std::move(outer_key));
  }

  Schema outer_schema = level_schema(inner_schema, outer);
  std::optional<BoundPredicate> having;
  if (outer.having) having.emplace(*outer.having, outer_schema);
  std::set<Tuple, TupleLess> passing;
  for (const auto& [key, acc] : groups) {
    double value = 0;
    switch (outer.function) {
      case AggFunction::sum: value = acc.sum; break;
      case AggFunction::count: value = static_cast<double>(acc.count); break;
      case AggFunction::avg: value = acc.sum / static_cast<double>(acc.count); break;
      default: fail(ErrorKind::unsupported_template, "outer MIN/MAX");
    }
    Tuple row = key;
    row.emplace_back(value);
    if (!having || having->evaluate(row)) passing.insert(key);
  }

  std::vector<Tuple> satisfied;
  for (const auto& [inner_key, outer_key] : members) {
    if (passing.count(outer_key)) satisfied.push_back(inner_key);
  }
  for (const auto& g : out.groups) out.probabilities.emplace(g.key, 0.0);
  for (const auto& key : satisfied) out.probabilities[key] = 1.0;
  out.satisfied = std::move(satisfied);
  return out;
}

}  // namespace pbds
