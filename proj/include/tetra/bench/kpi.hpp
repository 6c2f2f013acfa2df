#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tetra/bench/config.hpp"
#include "tetra/bench/epsilon.hpp"

namespace tetra::bench {

enum class OpKind : std::uint8_t { kRead, kWrite, kTraverse, kCommit };
std::string_view to_string(OpKind kind);

// One generated operation. Writes carry the payload recipe, so both arms
// put identical bytes.
struct Op {
  OpKind kind = OpKind::kRead;
  NodeId node = 0;
  std::uint32_t size = 0;
  std::uint64_t payload = 0;
};

// The warm-up and window traces of one trial.
struct Trace {
  std::vector<NodeId> hot;
  std::vector<Op> warmup;
  std::vector<Op> window;
};

Trace make_trace(const WorkloadConfig& config, std::uint64_t seed);

struct OpSample {
  OpKind kind = OpKind::kRead;
  double lat_ms = 0.0;
  bool hit = false;
  std::uint32_t depth = 0;
};

struct TrialResult {
  double p95_traverse_ms = 0.0;
  double p995_ms = 0.0;
  double wa = 0.0;
  double sa = 0.0;
  double h_cache = 0.0;
  double overhead = 0.0;
  std::uint64_t logical_bytes = 0;
  std::uint64_t physical_bytes = 0;
  std::size_t ops = 0;
  double busy_seconds = 0.0;
};

struct KpiValue {
  std::string metric;
  std::string target_text;
  double target = 0.0;
  bool at_most = true;
  // Informative rows are reported against the target but never gate a run.
  bool gating = true;
  double reference = 0.0;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool pass = false;
  // (mean - target) / target; negative is below the target.
  double margin = 0.0;
};

struct KpiReport {
  WorkloadConfig config;
  std::vector<TrialResult> trials;
  KpiValue latency;
  KpiValue wa;
  KpiValue h_cache;
  KpiValue overhead;
  double p995_ms = 0.0;
  // Point reads of the measured arm, all trials, window only.
  AccessLog reads;
  // Every window op of the measured arm in the first trial.
  std::vector<OpSample> first_trial;

  std::array<const KpiValue*, 4> rows() const { return {&latency, &wa, &h_cache, &overhead}; }
  // Every gating row passed.
  bool passed() const;
};

struct KpiOptions {
  // Run the verification-off arm alongside to measure security overhead.
  bool overhead = true;
};

// Warm-up, then the steady-state window, once per trial. Latency samples are
// trimmed by 1% at each end per op class and trial before aggregation.
// Throws kEngineUnavailable when the engine cannot be built from `config`.
KpiReport run_kpi(const WorkloadConfig& config, KpiOptions options = {});

// `metric,target,mean,ci_lo,ci_hi,pass`
std::string kpi_csv(const KpiReport& report);
// `op,lat_ms,hit,depth`
std::string latency_csv(const KpiReport& report);
// `trial,logical_bytes,physical_bytes,wa,sa`
std::string amplification_csv(const KpiReport& report);
// `trial,ops,busy_s,ops_per_s`
std::string throughput_csv(const KpiReport& report);
// One line per KPI.
std::string kpi_summary(const KpiReport& report);

}  // namespace tetra::bench
