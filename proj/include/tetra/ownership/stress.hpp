#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "tetra/ownership/lease_table.hpp"

namespace tetra::ownership {

struct StressParams {
  std::size_t workers = 8;
  // Acquire attempts across all workers.
  std::size_t ops = 100'000;
  std::size_t objects = 4;
  double write_fraction = 0.3;
  std::uint64_t seed = 1;
};

struct StressReport {
  std::size_t ops = 0;
  std::size_t reads_granted = 0;
  std::size_t writes_granted = 0;
  std::size_t refused = 0;
  // Holders that saw a conflicting holder through the shadow counters, plus
  // table states outside {(0, n), (1, 0)}.
  std::size_t violations = 0;
};

// Random acquire/hold/release traffic from `workers` threads. Every holder
// registers in shadow counters kept outside the table and checks them while
// it holds the lease.
StressReport stress_leases(const StressParams& params);

// `trial,violations`
std::string stress_csv(std::span<const StressReport> trials);

}  // namespace tetra::ownership
