#include "pbds/workbench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/common/seed.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

Distribution parse_distribution(std::string_view text) {
  if (text == "uniform") return Distribution::uniform;
  if (text == "zipf") return Distribution::zipf;
  if (text == "normal") return Distribution::normal;
  if (text == "constant") return Distribution::constant;
  if (text == "sequence") return Distribution::sequence;
  if (text == "derived") return Distribution::derived;
  if (text == "choice") return Distribution::choice;
  fail(ErrorKind::invalid_argument, fmt::format("unknown distribution '{}'", text));
}

namespace {

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Box-Muller on our own uniform stream, so values do not depend on the standard library.
double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class Zipf {
 public:
  Zipf(std::int64_t n, double s) : _cdf(static_cast<std::size_t>(n)) {
    double total = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
      total += std::pow(static_cast<double>(k), -s);
      _cdf[static_cast<std::size_t>(k - 1)] = total;
    }
    for (double& c : _cdf) c /= total;
  }

  std::int64_t operator()(Rng& rng) const {
    const double u = uniform_unit(rng);
    const auto it = std::upper_bound(_cdf.begin(), _cdf.end(), u);
    return std::min<std::int64_t>(static_cast<std::int64_t>(it - _cdf.begin()) + 1,
                                  static_cast<std::int64_t>(_cdf.size()));
  }

 private:
  std::vector<double> _cdf;
};

void validate(const ColumnSpec& c) {
  const auto bad = [&](const std::string& why) {
    fail(ErrorKind::invalid_argument, fmt::format("column '{}': {}", c.name, why));
  };
  switch (c.distribution) {
    case Distribution::uniform:
    case Distribution::derived:
      if (c.min > c.max) bad("min > max");
      break;
    case Distribution::zipf:
      if (c.n < 1 || !(c.s > 0)) bad("zipf needs n >= 1 and s > 0");
      break;
    case Distribution::normal:
      if (!(c.sd >= 0)) bad("negative standard deviation");
      break;
    case Distribution::choice:
      if (c.values.empty()) bad("no values to choose from");
      if (c.type != DataType::text) bad("choice columns are text");
      break;
    default: break;
  }
  if (c.type == DataType::text && c.distribution != Distribution::choice && c.distribution != Distribution::constant) {
    bad("text columns take choice or constant");
  }
}

Value make(DataType type, double v) {
  if (type == DataType::integer) return static_cast<std::int64_t>(std::llround(v));
  return v;
}

}  // namespace

Relation generate_data(const TableSpec& spec, std::uint64_t seed) {
  if (spec.rows < 1) fail(ErrorKind::invalid_argument, "a generated table needs at least one row");
  std::vector<Attribute> attributes;
  for (const auto& c : spec.columns) {
    validate(c);
    attributes.push_back({c.name, c.type});
  }
  Schema schema(spec.name, attributes, spec.primary_key);
  const auto n = static_cast<std::size_t>(spec.rows);
  std::vector<std::vector<Value>> columns(spec.columns.size());

  for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
    const ColumnSpec& c = spec.columns[ci];
    Rng rng = make_rng(derive_seed(seed, c.name));
    auto& out = columns[ci];
    out.reserve(n);
    std::optional<Zipf> zipf;
    if (c.distribution == Distribution::zipf) zipf.emplace(c.n, c.s);
    std::size_t source = 0;
    if (c.distribution == Distribution::derived) {
      source = schema.require(c.source);
      if (source >= ci) fail(ErrorKind::invalid_argument, fmt::format("column '{}' derives from a later column", c.name));
    }
    for (std::size_t r = 0; r < n; ++r) {
      switch (c.distribution) {
        case Distribution::uniform:
          if (c.type == DataType::integer) {
            out.emplace_back(uniform_int(rng, std::llround(c.min), std::llround(c.max)));
          } else {
            out.emplace_back(c.min + (c.max - c.min) * uniform_unit(rng));
          }
          break;
        case Distribution::zipf: out.push_back(make(c.type, static_cast<double>((*zipf)(rng)))); break;
        case Distribution::normal: out.push_back(make(c.type, c.mean + c.sd * standard_normal(rng))); break;
        case Distribution::constant:
          out.push_back(c.type == DataType::text ? Value(c.values.empty() ? std::string() : c.values.front())
                                                 : make(c.type, c.min));
          break;
        case Distribution::sequence: out.push_back(make(c.type, c.min + static_cast<double>(r))); break;
        case Distribution::derived: {
          const double base = as_double(columns[source][r]) * c.scale;
          const double noise = c.type == DataType::integer
                                   ? static_cast<double>(uniform_int(rng, std::llround(c.min), std::llround(c.max)))
                                   : c.min + (c.max - c.min) * uniform_unit(rng);
          out.push_back(make(c.type, base + noise));
          break;
        }
        case Distribution::choice: out.emplace_back(c.values[uniform_index(rng, c.values.size())]); break;
      }
    }
  }

  Relation rel(schema);
  rel.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    Tuple t;
    t.reserve(columns.size());
    for (auto& col : columns) t.push_back(std::move(col[r]));
    rel.add_row(std::move(t));
  }
  return rel;
}

TableSpec table_spec_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "table spec");
  try {
    TableSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.rows = j.at("rows").get<std::int64_t>();
    spec.primary_key = j.value("primary_key", std::vector<std::string>{});
    for (const auto& c : j.at("columns")) {
      ColumnSpec col;
      col.name = c.at("name").get<std::string>();
      col.type = parse_data_type(c.value("type", std::string("int")));
      col.distribution = parse_distribution(c.value("dist", std::string("uniform")));
      col.min = c.value("min", 0.0);
      col.max = c.value("max", 0.0);
      col.s = c.value("s", 1.0);
      col.n = c.value("n", std::int64_t{1});
      col.mean = c.value("mean", 0.0);
      col.sd = c.value("sd", 1.0);
      col.source = c.value("source", std::string());
      col.scale = c.value("scale", 1.0);
      col.values = c.value("values", std::vector<std::string>{});
      spec.columns.push_back(std::move(col));
    }
    return spec;
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed table spec: {}", e.what()));
  }
}

namespace {

ColumnSpec uniform_column(std::string name, double lo, double hi) {
  ColumnSpec c;
  c.name = std::move(name);
  c.min = lo;
  c.max = hi;
  return c;
}

ColumnSpec derived_column(std::string name, std::string source, double scale, double lo, double hi) {
  ColumnSpec c = uniform_column(std::move(name), lo, hi);
  c.distribution = Distribution::derived;
  c.source = std::move(source);
  c.scale = scale;
  return c;
}

}  // namespace

Database crimes_preset(std::int64_t rows, std::uint64_t seed) {
  TableSpec spec;
  spec.name = "crimes";
  spec.rows = rows;
  spec.primary_key = {"id"};
  ColumnSpec id = uniform_column("id", 1, 1);
  id.distribution = Distribution::sequence;
  ColumnSpec district = uniform_column("district", 0, 0);
  district.distribution = Distribution::zipf;
  district.n = 200;
  district.s = 0.5;
  ColumnSpec type;
  type.name = "primary_type";
  type.type = DataType::text;
  type.distribution = Distribution::choice;
  type.values = {"ASSAULT", "BATTERY", "BURGLARY", "NARCOTICS", "THEFT"};
  spec.columns = {id,
                  district,
                  derived_column("beat", "district", 10, 0, 9),
                  uniform_column("ward", 1, 150),
                  derived_column("community", "ward", 2, 0, 1),
                  uniform_column("block", 1, 5000),
                  uniform_column("year", 2001, 2024),
                  uniform_column("month", 1, 12),
                  type};
  Relation base = generate_data(spec, seed);

  // Crime counts depend on a per-district rate, so group totals spread out.
  Rng rate_rng = make_rng(derive_seed(seed, "rates"));
  std::vector<std::int64_t> rate(201);
  for (auto& r : rate) r = uniform_int(rate_rng, 1, 20);
  Rng count_rng = make_rng(derive_seed(seed, "numcrimes"));
  Rng arrest_rng = make_rng(derive_seed(seed, "arrests"));

  std::vector<Attribute> attributes = base.schema().attributes();
  attributes.push_back({"numcrimes", DataType::integer});
  attributes.push_back({"arrests", DataType::integer});
  Relation crimes(Schema("crimes", attributes, {"id"}));
  crimes.reserve(base.row_count());
  const std::size_t district_column = base.schema().require("district");
  for (const auto& row : base.rows()) {
    const auto d = std::get<std::int64_t>(row.values[district_column]);
    const std::int64_t count = uniform_int(count_rng, 0, 2 * rate[static_cast<std::size_t>(d)]);
    Tuple t = row.values;
    t.emplace_back(count);
    t.emplace_back(uniform_int(arrest_rng, 0, count));
    crimes.add_row(std::move(t));
  }
  Database db;
  db.emplace("crimes", std::move(crimes));
  return db;
}

Database tpch_preset(std::int64_t rows, std::uint64_t seed) {
  const std::int64_t order_count = std::max<std::int64_t>(1, rows / 4);
  TableSpec orders;
  orders.name = "orders";
  orders.rows = order_count;
  orders.primary_key = {"o_orderkey"};
  ColumnSpec key = uniform_column("o_orderkey", 1, 1);
  key.distribution = Distribution::sequence;
  ColumnSpec priority;
  priority.name = "o_priority";
  priority.type = DataType::text;
  priority.distribution = Distribution::choice;
  priority.values = {"1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT SPECIFIED", "5-LOW"};
  orders.columns = {key, uniform_column("o_custkey", 1, 500), uniform_column("o_year", 1992, 1998),
                    uniform_column("o_region", 1, 5), priority};

  TableSpec lineitem;
  lineitem.name = "lineitem";
  lineitem.rows = rows;
  lineitem.primary_key = {"l_id"};
  ColumnSpec lid = uniform_column("l_id", 1, 1);
  lid.distribution = Distribution::sequence;
  ColumnSpec part = uniform_column("l_partkey", 0, 0);
  part.distribution = Distribution::zipf;
  part.n = 400;
  part.s = 0.7;
  lineitem.columns = {lid,
                      uniform_column("l_orderkey", 1, static_cast<double>(order_count)),
                      part,
                      derived_column("l_suppkey", "l_partkey", 4, 0, 3),
                      uniform_column("l_quantity", 1, 50),
                      derived_column("l_extendedprice", "l_quantity", 20, 0, 500),
                      uniform_column("l_shipdays", 1, 365)};
  Database db;
  db.emplace("orders", generate_data(orders, derive_seed(seed, "orders")));
  db.emplace("lineitem", generate_data(lineitem, derive_seed(seed, "lineitem")));
  return db;
}

}  // namespace pbds
