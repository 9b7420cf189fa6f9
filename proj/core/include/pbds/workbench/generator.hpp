#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pbds/relalg/relation.hpp"

namespace pbds {

enum class Distribution { uniform, zipf, normal, constant, sequence, derived, choice };

/// One generated column. Parameters by distribution:
///   uniform   integer or real in [min, max]
///   zipf      rank in 1..n with P(k) ~ k^-s
///   normal    mean, sd (integer columns round)
///   constant  min
///   sequence  min, min + 1, ...
///   derived   source * scale + uniform noise in [min, max]; source is an earlier column
///   choice    uniform over `values` (text)
struct ColumnSpec {
  std::string name;
  DataType type = DataType::integer;
  Distribution distribution = Distribution::uniform;
  double min = 0;
  double max = 0;
  double s = 1;
  std::int64_t n = 1;
  double mean = 0;
  double sd = 1;
  std::string source;
  double scale = 1;
  std::vector<std::string> values;
};

struct TableSpec {
  std::string name;
  std::vector<ColumnSpec> columns;
  std::vector<std::string> primary_key;
  std::int64_t rows = 0;
};

Distribution parse_distribution(std::string_view text);

/// Deterministic in (spec, seed); each column draws from its own derived stream.
Relation generate_data(const TableSpec& spec, std::uint64_t seed);

TableSpec table_spec_from_json(std::string_view text);

/// Crimes-like table: id (key), district with skewed sizes and per-district rates, beat nested
/// in district, ward and community, block, year, month, numcrimes, arrests, primary_type.
Database crimes_preset(std::int64_t rows, std::uint64_t seed);

/// Order-line fact table `lineitem` with a foreign key into the `orders` dimension.
Database tpch_preset(std::int64_t rows, std::uint64_t seed);

}  // namespace pbds
