#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tetra::bench {

// Workload and engine settings for one run. Loaded from flat `key=value` text.
struct WorkloadConfig {
  std::uint64_t seed = 42;

  // Graph shape.
  std::uint64_t nodes = 10'000;
  std::uint64_t ba_m = 3;

  // Access pattern: a hot set of `hot_fraction * nodes` nodes receives
  // `hot_access` of all accesses, Zipf(alpha) by rank; the rest is uniform.
  double alpha = 0.9;
  double hot_fraction = 0.2;
  double hot_access = 0.98;

  // Op mix: traversals first, then reads vs writes among the remainder.
  double traverse_fraction = 0.01;
  double read_ratio = 0.9;
  unsigned hops = 3;

  // Value payload sizes, uniform in [value_min, value_max]; keys are node ids.
  std::uint64_t value_min = 64;
  std::uint64_t value_max = 1024;
  // Fraction of writes that re-put an earlier payload.
  double duplicate_ratio = 0.5;

  std::uint64_t warmup_ops = 10'000;
  std::uint64_t window_ops = 100'000;
  std::uint64_t trials = 30;
  // Ops per interleaving block of the two overhead arms.
  std::uint64_t block_ops = 1'000;

  // Engine settings.
  std::uint64_t commit_every = 1'000;
  std::uint64_t objects = 10;
  std::uint64_t max_chain = 2;
  std::uint64_t cache_capacity = 4'000;
  std::uint64_t segment_bytes = 4ull << 20;
  bool verify_on_get = true;
  bool deduplicate = true;
  bool enforce_capability = true;
  bool ownership = true;
  bool graph_split = true;

  // Estimation and commutation measurement.
  std::uint64_t resamples = 1'000;
  std::uint64_t horizon = 1'000;
  std::uint64_t reps = 30;

  // Throws kInvalidConfig on settings that are individually valid but inconsistent.
  void validate() const;
};

// Throws kParseError (detail = 1-based line) on malformed lines and
// out-of-range values, kUnknownKey on names it does not know.
WorkloadConfig parse_config(std::string_view text);
WorkloadConfig load_config(const std::filesystem::path& path);

// Every field as `key=value`, one per line, in declaration order. Parses back
// to the same config.
std::string to_text(const WorkloadConfig& config);

}  // namespace tetra::bench
