#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pbds {

enum class DataType { integer, real, text };

std::string_view to_string(DataType type);
DataType parse_data_type(std::string_view name);
inline bool is_numeric(DataType type) { return type != DataType::text; }

/// A single attribute value. NULL is deliberately not representable.
using Value = std::variant<std::int64_t, double, std::string>;
using Tuple = std::vector<Value>;

DataType type_of(const Value& value);

/// Numeric view of an integer or real value; throws type_mismatch on text.
double as_double(const Value& value);

/// Three-way comparison. Integers and reals compare numerically and exactly (as doubles),
/// text compares lexicographically; numeric vs text is a type_mismatch.
int compare_values(const Value& lhs, const Value& rhs);
int compare_tuples(const Tuple& lhs, const Tuple& rhs);

bool values_equal(const Value& lhs, const Value& rhs);

std::string to_string(const Value& value);
std::string to_string(const Tuple& tuple);

/// Parses a textual field into a value of the given type; nullopt if malformed.
std::optional<Value> parse_value(std::string_view field, DataType type);

struct ValueHash {
  std::size_t operator()(const Value& value) const noexcept;
};

struct TupleHash {
  std::size_t operator()(const Tuple& tuple) const noexcept;
};

struct TupleEqual {
  bool operator()(const Tuple& lhs, const Tuple& rhs) const noexcept;
};

struct TupleLess {
  bool operator()(const Tuple& lhs, const Tuple& rhs) const { return compare_tuples(lhs, rhs) < 0; }
};

}  // namespace pbds
