#pragma once

#include <optional>
#include <string>

#include "pbds/relalg/plan.hpp"

namespace pbds {

/// A sound bound on an unknown real: at least c, at most c, within [lo, hi], or nothing known.
class Bound {
 public:
  enum class Kind { at_least, at_most, exact_interval, unknown };

  static Bound at_least(double c);
  static Bound at_most(double c);
  static Bound exact_interval(double lo, double hi);
  static Bound unknown();
  /// Picks the tightest kind for possibly infinite endpoints.
  static Bound between(double lo, double hi);

  Kind kind() const { return _kind; }
  std::optional<double> lower() const;
  std::optional<double> upper() const;

  bool contains(double v) const;
  bool nonnegative() const { return lower() && *lower() >= 0; }
  bool negative() const { return upper() && *upper() < 0; }

  std::string to_string() const;
  bool operator==(const Bound&) const = default;

 private:
  Bound(Kind kind, double lo, double hi) : _kind(kind), _lo(lo), _hi(hi) {}

  Kind _kind;
  double _lo;
  double _hi;
};

/// Bound on the smallest value of `attribute` in the node's output (meaningful when the output is nonempty).
Bound min_value(const PlanNode& node, const std::string& attribute, const Database& db);
Bound max_value(const PlanNode& node, const std::string& attribute, const Database& db);
Bound min_value(const QueryPlan& plan, const std::string& attribute, const Database& db);
Bound max_value(const QueryPlan& plan, const std::string& attribute, const Database& db);

/// Interval containing every value of `attribute` in the node's output.
Bound value_bound(const PlanNode& node, const std::string& attribute, const Database& db);

}  // namespace pbds
