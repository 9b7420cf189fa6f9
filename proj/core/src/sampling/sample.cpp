#include "pbds/sampling/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

const Stratum* StratifiedSample::find(const Tuple& key) const {
  const auto it = std::lower_bound(strata.begin(), strata.end(), key, [](const Stratum& s, const Tuple& k) {
    return compare_tuples(s.key, k) < 0;
  });
  if (it == strata.end() || compare_tuples(it->key, key) != 0) return nullptr;
  return &*it;
}

std::size_t StratifiedSample::sample_size() const {
  std::size_t n = 0;
  for (const auto& s : strata) n += s.rows.size();
  return n;
}

Tuple group_key(const Relation& rel, const Row& row, const std::vector<std::string>& attributes) {
  Tuple key;
  key.reserve(attributes.size());
  for (const auto& a : attributes) key.push_back(row.values[rel.schema().require(a)]);
  return key;
}

namespace {

/// Algorithm R over the multiplicity-expanded units of `rows`.
std::vector<RowId> reservoir(const std::vector<const Row*>& rows, std::int64_t k, Rng& rng) {
  std::vector<std::pair<std::int64_t, RowId>> slots;
  slots.reserve(static_cast<std::size_t>(k));
  std::int64_t seen = 0;
  for (const Row* row : rows) {
    for (std::int64_t copy = 0; copy < row->multiplicity; ++copy, ++seen) {
      if (seen < k) {
        slots.emplace_back(seen, row->id);
        continue;
      }
      const auto j = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(seen + 1)));
      if (j < k) slots[static_cast<std::size_t>(j)] = {seen, row->id};
    }
  }
  std::sort(slots.begin(), slots.end());
  std::vector<RowId> out;
  out.reserve(slots.size());
  for (const auto& [_, id] : slots) out.push_back(id);
  return out;
}

std::int64_t target_size(double theta, std::int64_t group_size) {
  const auto k = static_cast<std::int64_t>(std::llround(theta * static_cast<double>(group_size)));
  return std::clamp<std::int64_t>(k, 1, group_size);
}

}  // namespace

StratifiedSample stratified_sample(const Relation& rel, std::vector<std::string> group_attributes, double theta,
                                   std::uint64_t seed, SamplingOptions options) {
  if (!(theta > 0 && theta <= 1)) fail(ErrorKind::invalid_argument, fmt::format("sample rate {} not in (0, 1]", theta));
  if (rel.size() == 0) fail(ErrorKind::empty_relation, fmt::format("cannot sample empty '{}'", rel.schema().relation_name()));
  std::sort(group_attributes.begin(), group_attributes.end());
  group_attributes.erase(std::unique(group_attributes.begin(), group_attributes.end()), group_attributes.end());

  StratifiedSample sample;
  sample.relation = rel.schema().relation_name();
  sample.attributes = group_attributes;
  sample.theta = theta;
  sample.seed = seed;

  std::vector<std::size_t> columns;
  for (const auto& a : group_attributes) columns.push_back(rel.schema().require(a));
  std::vector<std::pair<Tuple, const Row*>> keyed;
  keyed.reserve(rel.row_count());
  for (const auto& row : rel.rows()) {
    Tuple key;
    key.reserve(columns.size());
    for (const std::size_t c : columns) key.push_back(row.values[c]);
    keyed.emplace_back(std::move(key), &row);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return compare_tuples(a.first, b.first) < 0; });

  std::vector<std::pair<Tuple, std::vector<const Row*>>> groups;
  for (const auto& [key, row] : keyed) {
    if (groups.empty() || compare_tuples(groups.back().first, key) != 0) groups.emplace_back(key, std::vector<const Row*>{});
    groups.back().second.push_back(row);
  }
  sample.over_budget = static_cast<double>(groups.size()) > theta * static_cast<double>(rel.size());

  if (sample.over_budget && options.plain_fallback) {
    std::vector<const Row*> all;
    for (const auto& row : rel.rows()) all.push_back(&row);
    Rng rng = make_rng(derive_seed(seed, "plain"));
    sample.attributes.clear();
    sample.strata.push_back({{}, rel.size(), reservoir(all, target_size(theta, rel.size()), rng)});
    return sample;
  }

  sample.strata.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto& [key, rows] = groups[i];
    const std::int64_t size =
        std::accumulate(rows.begin(), rows.end(), std::int64_t{0}, [](std::int64_t n, const Row* r) { return n + r->multiplicity; });
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    sample.strata.push_back({std::move(key), size, reservoir(rows, target_size(theta, size), rng)});
  }
  return sample;
}

BootstrapResult bootstrap_mean(const std::vector<double>& values, int resamples, std::uint64_t seed) {
  if (resamples < 1) fail(ErrorKind::invalid_argument, "bootstrap needs at least one resample");
  if (values.empty()) fail(ErrorKind::invalid_argument, "bootstrap of an empty stratum");
  const std::size_t n = values.size();
  const auto b = static_cast<std::size_t>(resamples);
  std::vector<std::uint32_t> pool(n * b);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<std::uint32_t>(i % n);
  Rng rng = make_rng(seed);
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[uniform_index(rng, i)]);

  std::vector<double> means(b);
  for (std::size_t r = 0; r < b; ++r) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += values[pool[r * n + i]];
    means[r] = sum / static_cast<double>(n);
  }
  BootstrapResult out;
  out.resamples = resamples;
  out.mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
  if (b > 1) {
    double ss = 0;
    for (const double m : means) ss += (m - out.mean) * (m - out.mean);
    out.variance = ss / static_cast<double>(b - 1);
  }
  return out;
}

GroupStat bootstrap_stats(const StratifiedSample& sample, const Relation& rel, const std::string& attribute,
                          int resamples, std::uint64_t seed) {
  const std::size_t column = rel.schema().require(attribute);
  if (!is_numeric(rel.schema().attributes()[column].type)) {
    fail(ErrorKind::type_mismatch, fmt::format("'{}' is not numeric", attribute));
  }
  std::unordered_map<RowId, const Row*> by_id;
  by_id.reserve(rel.row_count());
  for (const auto& row : rel.rows()) by_id.emplace(row.id, &row);

  GroupStat stat{attribute, resamples, {}};
  stat.strata.reserve(sample.strata.size());
  for (std::size_t i = 0; i < sample.strata.size(); ++i) {
    std::vector<double> values;
    for (const RowId id : sample.strata[i].rows) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) fail(ErrorKind::unknown_id, fmt::format("sampled row {} not in '{}'", id, sample.relation));
      values.push_back(as_double(it->second->values[column]));
    }
    stat.strata.push_back(bootstrap_mean(values, resamples, derive_seed(seed, static_cast<std::uint64_t>(i))));
  }
  return stat;
}

std::string sample_to_json(const StratifiedSample& sample) {
  detail::json strata = detail::json::array();
  for (const auto& s : sample.strata) {
    detail::json key = detail::json::array();
    for (const auto& v : s.key) key.push_back(detail::to_json(v));
    strata.push_back({{"key", key}, {"size", s.size}, {"sample_row_ids", s.rows}});
  }
  return detail::json{{"relation", sample.relation},
                      {"attrs", sample.attributes},
                      {"theta", sample.theta},
                      {"seed", sample.seed},
                      {"over_budget", sample.over_budget},
                      {"strata", strata}}
      .dump();
}

StratifiedSample sample_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "sample");
  try {
    StratifiedSample s;
    s.relation = j.at("relation").get<std::string>();
    s.attributes = j.at("attrs").get<std::vector<std::string>>();
    s.theta = j.at("theta").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.over_budget = j.value("over_budget", false);
    for (const auto& st : j.at("strata")) {
      Stratum stratum;
      for (const auto& v : st.at("key")) stratum.key.push_back(detail::value_from_json(v));
      stratum.size = st.at("size").get<std::int64_t>();
      stratum.rows = st.at("sample_row_ids").get<std::vector<RowId>>();
      s.strata.push_back(std::move(stratum));
    }
    return s;
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed sample: {}", e.what()));
  }
}

}  // namespace pbds
