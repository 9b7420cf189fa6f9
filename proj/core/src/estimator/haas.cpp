#include "pbds/estimator/haas.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) fail(ErrorKind::invalid_argument, fmt::format("quantile level {} not in (0, 1)", p));
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double z_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) fail(ErrorKind::invalid_argument, fmt::format("confidence {} not in (0, 1)", alpha));
  return normal_quantile((alpha + 1) / 2);
}

namespace {

double mean(const std::vector<double>& f) {
  double s = 0;
  for (const double x : f) s += x;
  return s / static_cast<double>(f.size());
}

double comoment(const std::vector<double>& f, int q, const std::vector<double>& h, int r) {
  const double mf = mean(f);
  const double mh = mean(h);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(f[i] - mf, q) * std::pow(h[i] - mh, r);
  return s / static_cast<double>(f.size() - 1);
}

}  // namespace

HaasStats haas_interval(HaasAggregate aggregate, const std::vector<double>& u, const std::vector<double>& v,
                        double alpha) {
  if (u.size() != v.size()) fail(ErrorKind::invalid_argument, "indicator and value lengths differ");
  if (u.size() < 2) fail(ErrorKind::invalid_argument, "variance terms need at least two tuples");
  HaasStats s;
  s.n = u.size();
  s.z = z_alpha(alpha);

  std::vector<double> uv(s.n);
  for (std::size_t i = 0; i < s.n; ++i) uv[i] = u[i] * v[i];
  s.t_20 = comoment(uv, 2, uv, 0);
  s.t_02 = comoment(u, 2, u, 0);
  s.t_11 = comoment(uv, 1, u, 1);

  switch (aggregate) {
    case HaasAggregate::sum:
      s.t_n = mean(uv);
      s.t_n2 = s.t_20;
      s.estimate = s.t_n;
      s.variance = s.t_n2;
      break;
    case HaasAggregate::count:
      s.t_n = mean(u);
      s.t_n2 = s.t_02;
      s.estimate = s.t_n;
      s.variance = s.t_n2;
      break;
    case HaasAggregate::avg: {
      const double tu = mean(u);
      if (tu == 0) fail(ErrorKind::invalid_argument, "AVG without qualifying tuples");
      s.t_n = mean(uv);
      s.t_n2 = s.t_20;
      const double ratio = s.t_n / tu;
      s.estimate = ratio;
      s.variance = (s.t_20 - 2 * ratio * s.t_11 + ratio * ratio * s.t_02) / (tu * tu);
      break;
    }
  }
  s.epsilon = s.z * std::sqrt(std::max(0.0, s.variance)) / std::sqrt(static_cast<double>(s.n));
  return s;
}

}  // namespace pbds
