#pragma once

#include <cstddef>
#include <vector>

namespace pbds {

enum class HaasAggregate { sum, count, avg };

/// Large-sample confidence interval terms for an aggregate over n sampled tuples with predicate
/// indicator u and value v. Means are per tuple; SUM and COUNT scale by the population size.
struct HaasStats {
  std::size_t n = 0;
  double t_n = 0;   // T_n of the estimated quantity: uv for SUM and AVG, u for COUNT
  double t_n2 = 0;  // T_{n,2} of the same
  double t_11 = 0;  // T_{n,1,1}(uv, u)
  double t_20 = 0;  // T_{n,2}(uv)
  double t_02 = 0;  // T_{n,2}(u)
  double estimate = 0;
  double variance = 0;
  double z = 0;
  double epsilon = 0;
};

/// Standard normal quantile.
double normal_quantile(double p);

/// The (alpha + 1) / 2 quantile, the multiplier of a two-sided alpha-level interval.
double z_alpha(double alpha);

/// Throws invalid_argument for n < 2, alpha outside (0, 1), mismatched lengths, or an AVG
/// without qualifying tuples.
HaasStats haas_interval(HaasAggregate aggregate, const std::vector<double>& u, const std::vector<double>& v,
                        double alpha);

}  // namespace pbds
