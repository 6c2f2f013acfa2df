#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tetra/core/read_cache.hpp"

namespace tetra::bench {

// Point reads in issue order.
using AccessLog = std::vector<core::AccessRecord>;

struct EpsilonEstimate {
  std::size_t reads = 0;
  double h_cache = 0.0;
  double p = 0.0;
  // Mean dereference depth over misses; 0 when nothing missed.
  double c_k = 0.0;
  double eps = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  // Measured storage touches per read against the 1 + eps model.
  double mean_steps = 0.0;
  double model_steps = 0.0;
  double rel_error = 0.0;
  // Per-block correlation of measured mean steps with 1 + p_b * c_b.
  double step_correlation = 0.0;
};

// Percentile bootstrap over reads. Throws kEmptyLog on an empty log.
EpsilonEstimate estimate_epsilon(const AccessLog& log, std::size_t resamples = 1000, std::uint64_t seed = 0,
                                 std::size_t block = 1000);

// Reads that miss with probability `p`, each chasing `depth` chunks.
AccessLog synthetic_log(std::size_t reads, double p, std::uint32_t depth, std::uint64_t seed);

// `h_cache,p,c_k,eps,ci_lo,ci_hi`
std::string epsilon_csv(const EpsilonEstimate& e);

}  // namespace tetra::bench
