#include "pbds/relalg/value.hpp"

#include <charconv>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

std::string_view to_string(DataType type) {
  switch (type) {
    case DataType::integer: return "integer";
    case DataType::real: return "real";
    case DataType::text: return "text";
  }
  return "text";
}

DataType parse_data_type(std::string_view name) {
  if (name == "integer" || name == "int") return DataType::integer;
  if (name == "real" || name == "double" || name == "float") return DataType::real;
  if (name == "text" || name == "string") return DataType::text;
  fail(ErrorKind::parse, fmt::format("unknown data type '{}'", name));
}

DataType type_of(const Value& value) {
  switch (value.index()) {
    case 0: return DataType::integer;
    case 1: return DataType::real;
    default: return DataType::text;
  }
}

double as_double(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&value)) return *d;
  fail(ErrorKind::type_mismatch, fmt::format("text value '{}' used as a number", std::get<std::string>(value)));
}

int compare_values(const Value& lhs, const Value& rhs) {
  const auto* li = std::get_if<std::int64_t>(&lhs);
  const auto* ri = std::get_if<std::int64_t>(&rhs);
  if (li && ri) return (*li > *ri) - (*li < *ri);
  const auto* ls = std::get_if<std::string>(&lhs);
  const auto* rs = std::get_if<std::string>(&rhs);
  if (ls && rs) {
    const int c = ls->compare(*rs);
    return (c > 0) - (c < 0);
  }
  if (ls || rs) {
    fail(ErrorKind::type_mismatch, fmt::format("cannot compare {} with {}", to_string(lhs), to_string(rhs)));
  }
  const double l = as_double(lhs);
  const double r = as_double(rhs);
  return (l > r) - (l < r);
}

int compare_tuples(const Tuple& lhs, const Tuple& rhs) {
  const std::size_t n = std::min(lhs.size(), rhs.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (const int c = compare_values(lhs[i], rhs[i]); c != 0) return c;
  }
  return (lhs.size() > rhs.size()) - (lhs.size() < rhs.size());
}

bool values_equal(const Value& lhs, const Value& rhs) {
  if (lhs.index() != rhs.index()) {
    if (lhs.index() == 2 || rhs.index() == 2) return false;
    return as_double(lhs) == as_double(rhs);
  }
  return lhs == rhs;
}

std::string to_string(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) return fmt::format("{}", *d);
  return std::get<std::string>(value);
}

std::string to_string(const Tuple& tuple) {
  std::string out = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(tuple[i]);
  }
  return out + ")";
}

std::optional<Value> parse_value(std::string_view field, DataType type) {
  if (field.empty()) return std::nullopt;
  switch (type) {
    case DataType::integer: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
      return Value(v);
    }
    case DataType::real: {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) return std::nullopt;
      return Value(v);
    }
    case DataType::text: return Value(std::string(field));
  }
  return std::nullopt;
}

std::size_t ValueHash::operator()(const Value& value) const noexcept {
  // integers and integral reals hash alike, matching values_equal
  if (const auto* s = std::get_if<std::string>(&value)) return std::hash<std::string>{}(*s);
  const double d = std::holds_alternative<std::int64_t>(value) ? static_cast<double>(std::get<std::int64_t>(value))
                                                               : std::get<double>(value);
  return std::hash<double>{}(d == 0.0 ? 0.0 : d);
}

std::size_t TupleHash::operator()(const Tuple& tuple) const noexcept {
  std::size_t h = 0x84222325U;
  for (const auto& v : tuple) h ^= ValueHash{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6U) + (h >> 2U);
  return h;
}

bool TupleEqual::operator()(const Tuple& lhs, const Tuple& rhs) const noexcept {
  if (lhs.size() != rhs.size()) return false;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!values_equal(lhs[i], rhs[i])) return false;
  }
  return true;
}

}  // namespace pbds
