#pragma once

#include <span>
#include <vector>

namespace tetra::bench {

// Sorted copy of `values` with floor(n * fraction) samples dropped from each end.
std::vector<double> trim(std::span<const double> values, double fraction = 0.01);

// Nearest-rank percentile, q in (0, 1], of already sorted samples.
double nearest_rank(std::span<const double> sorted, double q);

double mean(std::span<const double> values);

struct MeanCi {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Student-t interval for the mean. A single sample gives a zero-width interval.
MeanCi mean_ci(std::span<const double> values, double level = 0.95);

// Pearson correlation; NaN when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace tetra::bench
