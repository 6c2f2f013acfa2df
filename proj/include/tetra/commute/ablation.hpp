#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tetra/bench/kpi.hpp"
#include "tetra/commute/harness.hpp"

namespace tetra::commute {

// One "Preserved" check per projection.
struct PreservationCheck {
  Projection projection = Projection::kPi1;
  bool preserved = false;
  std::string detail;
};

// pi1, pi3, pi6: rate CI upper bound below 1%. pi2: the same, plus a
// lineage check over a fresh commit chain. pi4: a duplicate put stores
// nothing new. pi5: an escalating grant is refused and revoking a capability
// takes its descendants with it. `rates` holds one row per projection.
std::vector<PreservationCheck> preservation_checks(const Config& config, std::span<const CommutationRow> rates,
                                                   std::uint64_t seed);

std::size_t preserved_count(std::span<const PreservationCheck> checks);

struct AblationRow {
  std::string component;
  Config config;
  std::vector<CommutationRow> rates;
  std::vector<PreservationCheck> checks;
  double preservation = 0.0;
  // Measured arm of the bench run with the component off, and its change
  // against the full engine. NaN when the bench part was skipped.
  double wa = 0.0;
  double wa_delta = 0.0;
  double p995_ms = 0.0;
  double p995_delta_ms = 0.0;
};

// Bench settings with `component` turned off.
bench::WorkloadConfig without(const bench::WorkloadConfig& workload, std::string_view component);

MeasureParams measure_params(const bench::WorkloadConfig& workload);

// Measures all projections and runs the bench with `component` off.
// `full` is the full-engine bench report to diff against; the bench part is
// skipped when it is null.
AblationRow ablate(std::string_view component, const bench::WorkloadConfig& workload,
                   const bench::KpiReport* full = nullptr);

// `component,config,preserved,preservation,wa,wa_delta,p995_ms,p995_delta_ms`
std::string ablation_csv(std::span<const AblationRow> rows);

}  // namespace tetra::commute
