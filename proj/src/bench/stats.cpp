#include "tetra/bench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "tetra/common.hpp"

namespace tetra::bench {

std::vector<double> trim(std::span<const double> values, double fraction) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(sorted.size()) * fraction));
  if (2 * cut >= sorted.size()) return sorted;
  return {sorted.begin() + static_cast<std::ptrdiff_t>(cut), sorted.end() - static_cast<std::ptrdiff_t>(cut)};
}

double nearest_rank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kInvalidParams, "percentile of no samples");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidParams, "percentile outside (0, 1]");
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

MeanCi mean_ci(std::span<const double> values, double level) {
  MeanCi out;
  out.mean = mean(values);
  out.lo = out.hi = out.mean;
  const auto n = values.size();
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
  const double half = t * sd / std::sqrt(static_cast<double>(n));
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace tetra::bench
