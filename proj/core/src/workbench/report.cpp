#include "pbds/workbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "../relalg/json_internal.hpp"
#include "pbds/common/error.hpp"

namespace pbds {

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

namespace {

std::optional<double> mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

detail::json optional_json(const std::optional<double>& v) { return v ? detail::json(*v) : detail::json(nullptr); }

std::optional<double> optional_from(const detail::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

ReplaySummary summarize(const RunReport& report) {
  ReplaySummary s;
  s.strategy = report.strategy;
  s.queries = report.queries.size();
  s.correct = report.correct();
  std::vector<double> rses;
  double relative = 0;
  for (const auto& q : report.queries) {
    s.rows_scanned += q.rows_scanned;
    s.sample_rows += q.sample_rows;
    if (q.reused) ++s.reused;
    if (!q.flag.empty()) ++s.flagged;
    if (q.sketched) {
      ++s.sketched;
      relative += static_cast<double>(q.actual_size) / static_cast<double>(std::max<std::int64_t>(1, q.relation_rows));
    }
    if (q.rse) rses.push_back(*q.rse);
  }
  if (s.sketched > 0) s.mean_relative_size = relative / static_cast<double>(s.sketched);
  s.median_rse = median(rses);
  s.mean_rse = mean(rses);
  return s;
}

std::string report_csv(const RunReport& report) {
  std::string out =
      "query,relation,attribute,reused,sketched,flag,estimated_size,actual_size,rse,rows_scanned,cumulative_rows,"
      "sample_rows,result_equal,contained\n";
  for (const auto& q : report.queries) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", q.index, q.relation, q.attribute, int(q.reused),
                       int(q.sketched), q.flag, q.estimated_size, q.actual_size,
                       q.rse ? fmt::format("{:.6f}", *q.rse) : std::string(), q.rows_scanned, q.cumulative_rows,
                       q.sample_rows, int(q.result_equal), int(q.contained));
  }
  return out;
}

std::string summary_to_json(const ReplaySummary& s) {
  detail::json j{{"strategy", s.strategy},
                 {"queries", s.queries},
                 {"sketched", s.sketched},
                 {"reused", s.reused},
                 {"flagged", s.flagged},
                 {"rows_scanned", s.rows_scanned},
                 {"sample_rows", s.sample_rows},
                 {"mean_relative_size", s.mean_relative_size},
                 {"median_rse", optional_json(s.median_rse)},
                 {"mean_rse", optional_json(s.mean_rse)},
                 {"correct", s.correct}};
  return j.dump(2);
}

ReplaySummary summary_from_json(std::string_view text) {
  const detail::json j = detail::parse_json(text, "summary");
  try {
    ReplaySummary s;
    s.strategy = j.at("strategy").get<std::string>();
    s.queries = j.at("queries").get<std::size_t>();
    s.sketched = j.at("sketched").get<std::size_t>();
    s.reused = j.at("reused").get<std::size_t>();
    s.flagged = j.at("flagged").get<std::size_t>();
    s.rows_scanned = j.at("rows_scanned").get<std::int64_t>();
    s.sample_rows = j.value("sample_rows", std::int64_t{0});
    s.mean_relative_size = j.at("mean_relative_size").get<double>();
    s.median_rse = optional_from(j, "median_rse");
    s.mean_rse = optional_from(j, "mean_rse");
    s.correct = j.at("correct").get<bool>();
    return s;
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("summary: {}", e.what()));
  }
}

std::string compare_summaries(std::vector<ReplaySummary> summaries) {
  std::stable_sort(summaries.begin(), summaries.end(),
                   [](const ReplaySummary& a, const ReplaySummary& b) { return a.rows_scanned < b.rows_scanned; });
  std::string out = "strategy,rows_scanned,sample_rows,reused,flagged,mean_relative_size,median_rse,correct\n";
  for (const auto& s : summaries) {
    out += fmt::format("{},{},{},{},{},{:.6f},{},{}\n", s.strategy, s.rows_scanned, s.sample_rows, s.reused, s.flagged,
                       s.mean_relative_size, s.median_rse ? fmt::format("{:.6f}", *s.median_rse) : std::string(),
                       int(s.correct));
  }
  return out;
}

RankingSummary summarize_ranking(const std::vector<RankingRecord>& records) {
  RankingSummary s;
  s.queries = records.size();
  std::vector<double> rses;
  std::vector<RankedQuery> ranked;
  std::map<std::string, std::pair<double, std::size_t>> relative;
  for (const auto& r : records) {
    for (const auto& e : r.ranking) {
      const auto it = r.actual.find(e.attribute);
      if (it == r.actual.end() || it->second == 0) continue;
      rses.push_back(std::abs(static_cast<double>(e.size - it->second)) / static_cast<double>(it->second));
    }
    ranked.push_back(r.ranked);
    for (const auto& [name, v] : r.relative_size) {
      relative[name].first += v;
      ++relative[name].second;
    }
  }
  s.median_rse = median(rses);
  s.mean_rse = mean(rses);
  if (!ranked.empty()) {
    s.top1 = ranking_accuracy(ranked, 1);
    s.top2 = ranking_accuracy(ranked, 2);
    s.top3 = ranking_accuracy(ranked, 3);
  }
  for (const auto& [name, acc] : relative) s.relative_size.emplace_back(name, acc.first / static_cast<double>(acc.second));
  return s;
}

std::string ranking_summary_to_json(const RankingSummary& s) {
  detail::json rel = detail::json::object();
  for (const auto& [name, v] : s.relative_size) rel[name] = v;
  detail::json j{{"queries", s.queries},          {"median_rse", optional_json(s.median_rse)},
                 {"mean_rse", optional_json(s.mean_rse)}, {"top1", s.top1},
                 {"top2", s.top2},                {"top3", s.top3},
                 {"relative_size", rel}};
  return j.dump(2);
}

}  // namespace pbds
