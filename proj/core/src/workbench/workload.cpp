#include "pbds/workbench/workload.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

namespace {

QueryTemplate parse_template(std::string_view text) {
  for (const auto t : {QueryTemplate::agh, QueryTemplate::ajgh, QueryTemplate::aagh, QueryTemplate::aajgh}) {
    if (to_string(t) == text) return t;
  }
  fail(ErrorKind::invalid_argument, fmt::format("unknown template '{}'", text));
}

bool nested(QueryTemplate t) { return t == QueryTemplate::aagh || t == QueryTemplate::aajgh; }
bool joined(QueryTemplate t) { return t == QueryTemplate::ajgh || t == QueryTemplate::aajgh; }

struct Choice {
  std::vector<std::string> group_by;
  AggFunction function;
  std::string input;
  AggFunction outer_function = AggFunction::count;
  std::vector<std::string> outer_group_by;
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[uniform_index(rng, items.size())];
}

Choice draw_choice(const WorkloadSpec& spec, Rng& rng) {
  Choice c;
  std::vector<std::string> pool = spec.group_by;
  const std::size_t min_arity = nested(spec.kind) ? 2 : 1;
  const std::size_t max_arity = std::min(std::max(spec.max_group_arity, min_arity), pool.size());
  const std::size_t arity = min_arity + uniform_index(rng, max_arity - min_arity + 1);
  for (std::size_t i = 0; i < arity; ++i) {
    const std::size_t k = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[k]);
    c.group_by.push_back(pool[i]);
  }
  c.function = pick(rng, spec.functions);
  c.input = pick(rng, spec.aggregation_inputs);
  if (nested(spec.kind)) {
    c.outer_group_by = {c.group_by[uniform_index(rng, c.group_by.size())]};
    c.outer_function = uniform_index(rng, 2) == 0 ? AggFunction::count : AggFunction::sum;
  }
  return c;
}

/// Value at quantile q of the output attribute, over the plan's result.
Value quantile_of(const PlanNode& node, const std::string& attribute, double q, const Database& db) {
  const Relation result = evaluate(QueryPlan(node), db);
  if (result.empty()) fail(ErrorKind::invalid_argument, "generated aggregation has no groups");
  const std::size_t column = result.schema().require(attribute);
  std::vector<Value> values;
  for (const auto& row : result.rows()) values.push_back(row.values[column]);
  std::sort(values.begin(), values.end(), [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
  const auto index = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  return values[index];
}

double draw_quantile(const WorkloadSpec& spec, Rng& rng) {
  return spec.quantile_lo + (spec.quantile_hi - spec.quantile_lo) * uniform_unit(rng);
}

void check(const WorkloadSpec& spec, const Database& db) {
  const auto bad = [](const std::string& why) { fail(ErrorKind::invalid_argument, why); };
  const Relation& fact = lookup(db, spec.fact);
  if (joined(spec.kind) != spec.join.has_value()) bad(fmt::format("{} {} a join", to_string(spec.kind), joined(spec.kind) ? "needs" : "takes no"));
  std::vector<std::string> known = fact.schema().attribute_names();
  if (spec.join) {
    const auto dim = lookup(db, spec.join->dimension).schema().attribute_names();
    known.insert(known.end(), dim.begin(), dim.end());
  }
  const auto require = [&](const std::string& a) {
    if (std::find(known.begin(), known.end(), a) == known.end()) bad(fmt::format("unknown attribute '{}'", a));
  };
  if (spec.group_by.empty() || spec.aggregation_inputs.empty() || spec.functions.empty()) {
    bad("workload needs group-by attributes, aggregation inputs and functions");
  }
  if (nested(spec.kind) && spec.group_by.size() < 2) bad("nested templates need two group-by attributes");
  for (const auto& a : spec.group_by) require(a);
  for (const auto& a : spec.aggregation_inputs) require(a);
  if (!spec.where_attribute.empty()) require(spec.where_attribute);
  if (!(spec.quantile_lo >= 0 && spec.quantile_lo <= spec.quantile_hi && spec.quantile_hi <= 1)) {
    bad("quantile range must lie in [0, 1]");
  }
  for (const auto f : spec.functions) {
    if (f == AggFunction::min || f == AggFunction::max) bad("workload functions are SUM, AVG and COUNT");
  }
}

}  // namespace

std::vector<QueryPlan> generate_workload(const WorkloadSpec& spec, const Database& db) {
  if (spec.query_count == 0) return {};
  check(spec, db);
  Rng template_rng = make_rng(derive_seed(spec.seed, "templates"));
  std::vector<Choice> fixed;
  for (std::size_t i = 0; i < spec.distinct_templates; ++i) fixed.push_back(draw_choice(spec, template_rng));

  Rng rng = make_rng(derive_seed(spec.seed, "queries"));
  std::vector<QueryPlan> out;
  out.reserve(spec.query_count);
  for (std::size_t i = 0; i < spec.query_count; ++i) {
    const Choice c = fixed.empty() ? draw_choice(spec, rng) : fixed[uniform_index(rng, fixed.size())];
    PlanNode base = plan::table(spec.fact);
    if (spec.join) {
      base = plan::join(spec.join->fact_attribute, spec.join->dimension_attribute, std::move(base),
                        plan::table(spec.join->dimension));
    }
    if (!spec.where_attribute.empty() && uniform_unit(rng) < spec.where_probability) {
      const auto c_where = spec.where_lo + static_cast<std::int64_t>(
                                               uniform_index(rng, static_cast<std::uint64_t>(spec.where_hi - spec.where_lo + 1)));
      base = plan::select(compare(spec.where_attribute, CompareOp::ge, c_where), std::move(base));
    }
    const std::string input = c.function == AggFunction::count ? std::string() : c.input;
    PlanNode inner = plan::aggregate(c.function, input, "agg", c.group_by, std::move(base));
    const Value threshold = quantile_of(inner, "agg", draw_quantile(spec, rng), db);
    PlanNode having = plan::select(compare("agg", CompareOp::ge, threshold), std::move(inner));
    if (!nested(spec.kind)) {
      out.emplace_back(std::move(having));
      continue;
    }
    const std::string outer_input = c.outer_function == AggFunction::count ? std::string() : "agg";
    PlanNode outer = plan::aggregate(c.outer_function, outer_input, "agg2", c.outer_group_by, std::move(having));
    const Value outer_threshold = quantile_of(outer, "agg2", draw_quantile(spec, rng), db);
    out.emplace_back(plan::select(compare("agg2", CompareOp::ge, outer_threshold), std::move(outer)));
  }
  return out;
}

WorkloadSpec workload_spec_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "workload spec");
  try {
    WorkloadSpec s;
    s.kind = parse_template(j.value("template", std::string("Q-AGH")));
    s.fact = j.value("fact", s.fact);
    if (j.contains("join")) {
      const auto& jj = j.at("join");
      s.join = ForeignKeyJoin{jj.at("dimension").get<std::string>(), jj.at("fact_attribute").get<std::string>(),
                              jj.at("dimension_attribute").get<std::string>()};
    }
    s.group_by = j.value("group_by", std::vector<std::string>{});
    s.max_group_arity = j.value("max_group_arity", s.max_group_arity);
    s.aggregation_inputs = j.value("aggregation_inputs", std::vector<std::string>{});
    if (j.contains("functions")) {
      s.functions.clear();
      for (const auto& f : j.at("functions")) s.functions.push_back(parse_agg_function(f.get<std::string>()));
    }
    s.query_count = j.value("queries", std::size_t{0});
    s.distinct_templates = j.value("distinct_templates", std::size_t{0});
    if (j.contains("quantile")) {
      s.quantile_lo = j.at("quantile").at(0).get<double>();
      s.quantile_hi = j.at("quantile").at(1).get<double>();
    }
    if (j.contains("where")) {
      const auto& w = j.at("where");
      s.where_attribute = w.at("attribute").get<std::string>();
      s.where_probability = w.value("probability", 0.5);
      s.where_lo = w.at("range").at(0).get<std::int64_t>();
      s.where_hi = w.at("range").at(1).get<std::int64_t>();
    }
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed workload spec: {}", e.what()));
  }
}

std::string workload_spec_to_json(const WorkloadSpec& s) {
  detail::json j{{"template", to_string(s.kind)},
                 {"fact", s.fact},
                 {"group_by", s.group_by},
                 {"max_group_arity", s.max_group_arity},
                 {"aggregation_inputs", s.aggregation_inputs},
                 {"queries", s.query_count},
                 {"distinct_templates", s.distinct_templates},
                 {"quantile", {s.quantile_lo, s.quantile_hi}},
                 {"seed", s.seed}};
  detail::json functions = detail::json::array();
  for (const auto f : s.functions) functions.push_back(to_string(f));
  j["functions"] = functions;
  if (s.join) {
    j["join"] = {{"dimension", s.join->dimension},
                 {"fact_attribute", s.join->fact_attribute},
                 {"dimension_attribute", s.join->dimension_attribute}};
  }
  if (!s.where_attribute.empty()) {
    j["where"] = {{"attribute", s.where_attribute},
                  {"probability", s.where_probability},
                  {"range", {s.where_lo, s.where_hi}}};
  }
  return j.dump(2);
}

}  // namespace pbds
