#include "tetra/ownership/stress.hpp"

#include <atomic>
#include <random>
#include <thread>
#include <vector>

namespace tetra::ownership {

StressReport stress_leases(const StressParams& params) {
  if (params.workers == 0 || params.objects == 0) throw Error(ErrorCode::kInvalidParams, "need workers and objects");
  LeaseTable table;
  for (ObjectId o = 0; o < params.objects; ++o) table.release(table.create(o));

  struct Shadow {
    std::atomic<std::int64_t> readers{0};
    std::atomic<std::int64_t> writers{0};
  };
  std::vector<Shadow> shadow(params.objects);
  std::atomic<std::size_t> reads{0}, writes{0}, refused{0}, violations{0};

  auto worker = [&](std::size_t w) {
    std::mt19937_64 rng(params.seed * 1'000'003 + w);
    const std::size_t share = params.ops / params.workers + (w < params.ops % params.workers ? 1 : 0);
    auto check_table = [&](ObjectId o) {
      const auto s = table.state(o);
      if (s.writer && s.readers > 0) violations.fetch_add(1);
    };
    for (std::size_t i = 0; i < share; ++i) {
      const ObjectId o = rng() % params.objects;
      const bool write = static_cast<double>(rng() >> 11) * 0x1.0p-53 < params.write_fraction;
      try {
        if (write) {
          const auto lease = table.acquire_write(o);
          shadow[o].writers.fetch_add(1);
          if (shadow[o].writers.load() != 1 || shadow[o].readers.load() != 0) violations.fetch_add(1);
          check_table(o);
          if (rng() % 4 == 0) std::this_thread::yield();
          if (shadow[o].writers.load() != 1 || shadow[o].readers.load() != 0) violations.fetch_add(1);
          shadow[o].writers.fetch_sub(1);
          table.release(lease);
          writes.fetch_add(1);
        } else {
          const auto lease = table.acquire_read(o);
          shadow[o].readers.fetch_add(1);
          if (shadow[o].writers.load() != 0) violations.fetch_add(1);
          check_table(o);
          if (rng() % 4 == 0) std::this_thread::yield();
          if (shadow[o].writers.load() != 0) violations.fetch_add(1);
          shadow[o].readers.fetch_sub(1);
          table.release(lease);
          reads.fetch_add(1);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kWriterActive && e.code() != ErrorCode::kReadersActive) throw;
        refused.fetch_add(1);
        check_table(o);
      }
    }
  };

  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < params.workers; ++w) threads.emplace_back(worker, w);
  for (auto& t : threads) t.join();

  StressReport r;
  r.ops = params.ops;
  r.reads_granted = reads;
  r.writes_granted = writes;
  r.refused = refused;
  r.violations = violations;
  return r;
}

std::string stress_csv(std::span<const StressReport> trials) {
  std::string out = "trial,violations\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(trials[i].violations) + '\n';
  }
  return out;
}

}  // namespace tetra::ownership
