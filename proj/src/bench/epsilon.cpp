#include "tetra/bench/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>

#include "tetra/bench/stats.hpp"
#include "tetra/bench/workload.hpp"

namespace tetra::bench {

namespace {

// Summed chase length of the misses in [first, last), and their count.
std::pair<double, double> misses(AccessLog::const_iterator first, AccessLog::const_iterator last) {
  double count = 0.0, depth = 0.0;
  for (auto it = first; it != last; ++it) {
    if (!it->hit) {
      count += 1.0;
      depth += it->depth;
    }
  }
  return {count, depth};
}

}  // namespace

EpsilonEstimate estimate_epsilon(const AccessLog& log, std::size_t resamples, std::uint64_t seed, std::size_t block) {
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "no reads to estimate from");
  if (resamples == 0 || block == 0) throw Error(ErrorCode::kInvalidParams, "resamples and block must be positive");
  EpsilonEstimate e;
  const auto n = static_cast<double>(log.size());
  e.reads = log.size();
  const auto [miss_count, miss_depth] = misses(log.begin(), log.end());
  e.p = miss_count / n;
  e.h_cache = 1.0 - e.p;
  e.c_k = miss_count > 0 ? miss_depth / miss_count : 0.0;
  e.eps = e.p * e.c_k;

  double steps = 0.0;
  for (const auto& r : log) steps += r.steps;
  e.mean_steps = steps / n;
  e.model_steps = 1.0 + e.eps;
  e.rel_error = std::abs(e.mean_steps - e.model_steps) / e.model_steps;

  // eps is the mean of (miss ? depth : 0), so a resample only needs the
  // multinomial counts over the distinct values.
  std::map<std::uint32_t, std::uint64_t> counts;
  for (const auto& r : log) ++counts[r.hit ? 0 : r.depth];
  boost::random::mt19937_64 engine(derive_seed(seed, "bootstrap"));
  std::vector<double> draws;
  draws.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::uint64_t remaining = log.size();
    double mass = 1.0, total = 0.0;
    for (const auto& [value, count] : counts) {
      if (remaining == 0) break;
      const double q = std::min(1.0, (static_cast<double>(count) / n) / mass);
      std::uint64_t k = remaining;
      if (q < 1.0) {
        boost::random::binomial_distribution<std::int64_t, double> dist(static_cast<std::int64_t>(remaining), q);
        k = static_cast<std::uint64_t>(dist(engine));
      }
      total += static_cast<double>(value) * static_cast<double>(k);
      remaining -= k;
      mass -= static_cast<double>(count) / n;
    }
    draws.push_back(total / n);
  }
  std::sort(draws.begin(), draws.end());
  e.ci_lo = nearest_rank(draws, 0.025);
  e.ci_hi = nearest_rank(draws, 0.975);

  std::vector<double> measured, modelled;
  for (std::size_t start = 0; start < log.size(); start += block) {
    const auto first = log.begin() + static_cast<std::ptrdiff_t>(start);
    const auto last = log.begin() + static_cast<std::ptrdiff_t>(std::min(log.size(), start + block));
    const auto size = static_cast<double>(last - first);
    double s = 0.0;
    for (auto it = first; it != last; ++it) s += it->steps;
    const auto [bc, bd] = misses(first, last);
    measured.push_back(s / size);
    modelled.push_back(1.0 + (bc / size) * (bc > 0 ? bd / bc : 0.0));
  }
  e.step_correlation = pearson(measured, modelled);
  return e;
}

AccessLog synthetic_log(std::size_t reads, double p, std::uint32_t depth, std::uint64_t seed) {
  Rng rng(seed);
  AccessLog log(reads);
  for (auto& r : log) {
    r.hit = !rng.chance(p);
    r.depth = depth;
    r.steps = r.hit ? 1 : 1 + depth;
  }
  return log;
}

std::string epsilon_csv(const EpsilonEstimate& e) {
  char row[256];
  std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", e.h_cache, e.p, e.c_k, e.eps, e.ci_lo, e.ci_hi);
  return std::string("h_cache,p,c_k,eps,ci_lo,ci_hi\n") + row;
}

}  // namespace tetra::bench
