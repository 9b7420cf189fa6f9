#include "pbds/common/error.hpp"

namespace pbds {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::unknown_relation: return "unknown_relation";
    case ErrorKind::unknown_attribute: return "unknown_attribute";
    case ErrorKind::unknown_id: return "unknown_id";
    case ErrorKind::type_mismatch: return "type_mismatch";
    case ErrorKind::invalid_plan: return "invalid_plan";
    case ErrorKind::uncovered_value: return "uncovered_value";
    case ErrorKind::overlapping_ranges: return "overlapping_ranges";
    case ErrorKind::empty_relation: return "empty_relation";
    case ErrorKind::unsupported_template: return "unsupported_template";
    case ErrorKind::missing_stratum: return "missing_stratum";
    case ErrorKind::empty_pool: return "empty_pool";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::correctness: return "correctness";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace pbds
