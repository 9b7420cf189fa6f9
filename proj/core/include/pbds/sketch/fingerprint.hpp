#pragma once

#include <string>
#include <vector>

#include "pbds/relalg/plan.hpp"

namespace pbds {

/// A constant lifted out of an `attribute ◇ constant` atom of some selection.
struct ConstantSlot {
  OperatorId selection = 0;
  CompareOp op = CompareOp::eq;
  Value value;

  bool operator==(const ConstantSlot&) const = default;
};

/// Canonical plan text with constants replaced by slots; group-by lists and conjuncts are sorted.
struct Fingerprint {
  std::string text;
  std::vector<ConstantSlot> slots;

  bool operator==(const Fingerprint&) const = default;
};

Fingerprint fingerprint(const QueryPlan& plan);

/// True if every constant of `now` is at least as restrictive as the matching one of `then`,
/// and tightening those selections can only shrink the lineage of `plan`.
bool subsumes(const Fingerprint& then, const Fingerprint& now, const QueryPlan& plan, const Database& db);

}  // namespace pbds
