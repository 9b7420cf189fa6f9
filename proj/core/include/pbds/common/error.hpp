#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbds {

enum class ErrorKind {
  invalid_argument,
  unknown_relation,
  unknown_attribute,
  unknown_id,
  type_mismatch,
  invalid_plan,
  uncovered_value,
  overlapping_ranges,
  empty_relation,
  unsupported_template,
  missing_stratum,
  empty_pool,
  io,
  parse,
  correctness,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), _kind(kind) {}

  ErrorKind kind() const noexcept { return _kind; }

 private:
  ErrorKind _kind;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace pbds
