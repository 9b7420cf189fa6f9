#pragma once

#include <cstdint>
#include <vector>

namespace pbds {

/// P(fragment in sketch) from its groups' pass probabilities: the point value assumes independent
/// groups, the bounds hold for any dependence.
struct ProbabilityInterval {
  double point = 0;
  double lower = 0;
  double upper = 0;
};

ProbabilityInterval fragment_probability(const std::vector<double>& group_probabilities);

struct ExpectationBounds {
  double expected = 0;
  double lower = 0;
  double upper = 0;
};

/// E[size] = sum of fragment size times P(fragment in sketch), one probability list per fragment.
ExpectationBounds expectation_bounds(const std::vector<std::vector<double>>& fragment_groups,
                                     const std::vector<std::int64_t>& fragment_sizes);

/// |estimated - actual| / actual; throws invalid_argument when actual is 0.
double rse(double estimated, double actual);

}  // namespace pbds
