#include "pbds/estimator/expectation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

ProbabilityInterval fragment_probability(const std::vector<double>& group_probabilities) {
  ProbabilityInterval out;
  double none = 1;
  double sum = 0;
  for (const double p : group_probabilities) {
    if (!(p >= 0 && p <= 1)) fail(ErrorKind::invalid_argument, fmt::format("probability {} not in [0, 1]", p));
    none *= 1 - p;
    sum += p;
    out.lower = std::max(out.lower, p);
  }
  out.point = 1 - none;
  out.upper = std::min(1.0, sum);
  // Rounding can push the product form a hair outside the bounds.
  out.point = std::clamp(out.point, out.lower, out.upper);
  return out;
}

ExpectationBounds expectation_bounds(const std::vector<std::vector<double>>& fragment_groups,
                                     const std::vector<std::int64_t>& fragment_sizes) {
  if (fragment_groups.size() != fragment_sizes.size()) {
    fail(ErrorKind::invalid_argument, "one probability list per fragment expected");
  }
  ExpectationBounds out;
  for (std::size_t r = 0; r < fragment_groups.size(); ++r) {
    const ProbabilityInterval p = fragment_probability(fragment_groups[r]);
    const auto size = static_cast<double>(fragment_sizes[r]);
    out.expected += size * p.point;
    out.lower += size * p.lower;
    out.upper += size * p.upper;
  }
  return out;
}

double rse(double estimated, double actual) {
  if (actual == 0) fail(ErrorKind::invalid_argument, "relative size error of an empty sketch");
  return std::fabs(estimated - actual) / actual;
}

}  // namespace pbds
