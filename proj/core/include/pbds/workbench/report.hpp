#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/workbench/replay.hpp"

namespace pbds {

struct ReplaySummary {
  std::string strategy;
  std::size_t queries = 0;
  std::size_t sketched = 0;
  std::size_t reused = 0;
  std::size_t flagged = 0;
  std::int64_t rows_scanned = 0;
  std::int64_t sample_rows = 0;
  /// Mean of sketch size over relation size across sketched queries.
  double mean_relative_size = 0;
  std::optional<double> median_rse;
  std::optional<double> mean_rse;
  bool correct = true;
};

ReplaySummary summarize(const RunReport& report);

/// One line per query; no wall-clock column so reruns diff cleanly.
std::string report_csv(const RunReport& report);

std::string summary_to_json(const ReplaySummary& summary);
ReplaySummary summary_from_json(std::string_view text);

/// Table of summaries ordered by rows scanned, as CSV.
std::string compare_summaries(std::vector<ReplaySummary> summaries);

struct RankingSummary {
  std::size_t queries = 0;
  std::optional<double> median_rse;
  std::optional<double> mean_rse;
  double top1 = 0;
  double top2 = 0;
  double top3 = 0;
  /// Strategy name to mean relative sketch size.
  std::vector<std::pair<std::string, double>> relative_size;
};

/// RSE is taken over every (query, candidate) pair with a non-empty actual sketch.
RankingSummary summarize_ranking(const std::vector<RankingRecord>& records);
std::string ranking_summary_to_json(const RankingSummary& summary);

std::optional<double> median(std::vector<double> values);

}  // namespace pbds
