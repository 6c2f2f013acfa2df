#include "tetra/bench/kpi.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "tetra/bench/stats.hpp"
#include "tetra/bench/workload.hpp"
#include "tetra/core/engine.hpp"

namespace tetra::bench {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kRead: return "read";
    case OpKind::kWrite: return "write";
    case OpKind::kTraverse: return "traverse";
    case OpKind::kCommit: return "commit";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Bytes payload_bytes(const Op& op) {
  Rng rng(op.payload);
  Bytes out(op.size);
  for (std::size_t i = 0; i < out.size(); i += 8) {
    auto word = rng.next();
    for (std::size_t j = i; j < std::min(out.size(), i + 8); ++j, word >>= 8) out[j] = static_cast<std::byte>(word);
  }
  return out;
}

core::EngineOptions engine_options(const WorkloadConfig& c, bool verify) {
  core::EngineOptions o;
  o.store.segment_bytes = c.segment_bytes;
  o.store.verify_on_get = c.verify_on_get;
  o.store.deduplicate = c.deduplicate;
  o.lineage.max_chain = c.max_chain;
  o.lineage.partition.owner_width = (c.nodes + c.objects - 1) / c.objects;
  o.lineage.cache_capacity = c.cache_capacity;
  o.traversal.enforce_capability = verify;
  o.ownership = c.ownership;
  return o;
}

// One engine executing a trace, with or without capability verification.
class Arm {
 public:
  Arm(const WorkloadConfig& config, const graph::Graph& graph, bool verify)
      : config_(config), verify_(verify), engine_(std::make_unique<core::Engine>(engine_options(config, verify))) {
    auto& caps = engine_->capabilities();
    const auto root = caps.mint_root(capability::Region::all(), capability::Rights::kAdmin);
    cap_ = caps.grant(root, capability::Region::all(), capability::Rights::kWrite, 1ull << 40, "bench").id;
    for (ObjectId o = 0; o < config.objects; ++o) objects_.push_back(o);
    engine_->lineage().commit(core::observation_from(graph), tick_);
    open();
  }

  core::Engine& engine() { return *engine_; }

  OpSample run(const Op& op) {
    OpSample s{op.kind};
    const auto start = Clock::now();
    switch (op.kind) {
      case OpKind::kRead: {
        if (verify_) require(engine_->capabilities().verify(cap_, capability::Region::point(op.node),
                                                            capability::Rights::kRead, tick_));
        core::AccessRecord access;
        engine_->lineage().read_node(*engine_->lineage().head(), op.node, &access);
        s.hit = access.hit;
        s.depth = access.depth;
        reads_.push_back(access);
        break;
      }
      case OpKind::kTraverse: {
        const auto& g = config_.graph_split ? engine_->lineage().head_view() : session_->editor().staged();
        graph::traverse_khop(g, op.node, config_.hops, engine_->context(cap_, tick_));
        break;
      }
      case OpKind::kWrite: {
        const auto value = engine_->store().put(payload_bytes(op));
        session_->editor().set_value(op.node, value);
        if (++pending_ == config_.commit_every) {
          s.lat_ms = elapsed_ms(start);
          samples_.push_back(s);
          return commit();
        }
        break;
      }
      case OpKind::kCommit:
        return commit();
    }
    s.lat_ms = elapsed_ms(start);
    samples_.push_back(s);
    return s;
  }

  // Commits whatever is staged; the latency includes opening the next session.
  OpSample commit() {
    OpSample s{OpKind::kCommit};
    const auto start = Clock::now();
    session_->commit(++tick_);
    session_.reset();
    open();
    pending_ = 0;
    s.lat_ms = elapsed_ms(start);
    samples_.push_back(s);
    return s;
  }

  void flush() {
    if (pending_ > 0) commit();
  }

  void reset_logs() {
    samples_.clear();
    reads_.clear();
  }

  const std::vector<OpSample>& samples() const { return samples_; }
  AccessLog& reads() { return reads_; }

  // Bytes needed for the head alone: its snapshot, record chunks and values.
  std::uint64_t live_bytes() {
    const auto head = engine_->lineage().head();
    const auto& store = engine_->store();
    std::uint64_t total = core::serialize(*head).size();
    std::unordered_set<cas::ContentHash> seen;
    auto add = [&](const cas::ContentHash& h) {
      if (!seen.insert(h).second) return;
      if (auto loc = store.locate(h)) total += loc->length;
    };
    for (const auto& [id, entry] : head->root) {
      for (const auto& f : entry.fragments) add(f);
    }
    for (const auto& [id, node] : engine_->lineage().head_view().nodes()) {
      if (node.value) add(*node.value);
    }
    return total;
  }

 private:
  static void require(const capability::Verdict& v) {
    if (!v) throw Error(ErrorCode::kCapabilityRejected, std::string(capability::to_string(v.reason)));
  }

  void open() { session_.emplace(engine_->open(cap_, objects_, tick_)); }

  const WorkloadConfig& config_;
  bool verify_;
  std::unique_ptr<core::Engine> engine_;
  capability::CapId cap_ = capability::kNoCap;
  std::vector<ObjectId> objects_;
  Tick tick_ = 1;
  std::optional<core::Engine::Session> session_;
  std::size_t pending_ = 0;
  std::vector<OpSample> samples_;
  AccessLog reads_;
};

// Per-class trimmed means, weighted by class size.
double trimmed_mean_latency(const std::vector<OpSample>& samples) {
  std::array<std::vector<double>, 4> by_class;
  for (const auto& s : samples) by_class[static_cast<std::size_t>(s.kind)].push_back(s.lat_ms);
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& values : by_class) {
    if (values.empty()) continue;
    total += mean(trim(values)) * static_cast<double>(values.size());
    count += values.size();
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

KpiValue make_value(std::string metric, std::string target_text, double target, bool at_most, bool gating,
                    double reference, const std::vector<double>& per_trial) {
  KpiValue v{std::move(metric), std::move(target_text), target, at_most, gating, reference};
  const auto ci = mean_ci(per_trial);
  v.mean = ci.mean;
  v.ci_lo = ci.lo;
  v.ci_hi = ci.hi;
  v.pass = at_most ? v.mean <= target : v.mean >= target;
  v.margin = (v.mean - target) / target;
  return v;
}

}  // namespace

Trace make_trace(const WorkloadConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NodeId> order(c.nodes);
  for (std::size_t i = 0; i < c.nodes; ++i) order[i] = i;
  for (std::size_t i = c.nodes; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto hot_size = std::min(c.nodes, static_cast<std::size_t>(std::ceil(c.hot_fraction * c.nodes)));
  Trace t;
  t.hot.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hot_size));
  const std::vector<NodeId> cold(order.begin() + static_cast<std::ptrdiff_t>(hot_size), order.end());
  std::optional<ZipfSampler> zipf;
  if (!t.hot.empty()) zipf.emplace(c.alpha, t.hot.size());

  auto key = [&]() -> NodeId {
    if (!t.hot.empty() && (cold.empty() || rng.chance(c.hot_access))) return t.hot[zipf->sample(rng) - 1];
    return rng.pick(cold);
  };
  std::vector<Op> fresh;
  auto draw = [&]() {
    Op op;
    if (rng.chance(c.traverse_fraction)) {
      op.kind = OpKind::kTraverse;
    } else if (rng.chance(c.read_ratio)) {
      op.kind = OpKind::kRead;
    } else {
      op.kind = OpKind::kWrite;
    }
    op.node = key();
    if (op.kind == OpKind::kWrite) {
      if (!fresh.empty() && rng.chance(c.duplicate_ratio)) {
        const auto& earlier = rng.pick(fresh);
        op.size = earlier.size;
        op.payload = earlier.payload;
      } else {
        op.size = static_cast<std::uint32_t>(c.value_min + rng.below(c.value_max - c.value_min + 1));
        op.payload = rng.next();
        fresh.push_back(op);
      }
    }
    return op;
  };
  t.warmup.reserve(c.warmup_ops);
  for (std::size_t i = 0; i < c.warmup_ops; ++i) t.warmup.push_back(draw());
  t.window.reserve(c.window_ops);
  for (std::size_t i = 0; i < c.window_ops; ++i) t.window.push_back(draw());
  return t;
}

bool KpiReport::passed() const {
  for (const auto* row : rows()) {
    if (row->gating && !row->pass) return false;
  }
  return true;
}

KpiReport run_kpi(const WorkloadConfig& config, KpiOptions options) {
  config.validate();
  KpiReport report;
  report.config = config;
  std::vector<double> p95s, was, hits, overheads, p995s;

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const auto graph = gen_graph(config.nodes, config.ba_m, derive_seed(config.seed, "graph", trial));
    const auto trace = make_trace(config, derive_seed(config.seed, "workload", trial));

    std::vector<std::unique_ptr<Arm>> arms;
    try {
      arms.push_back(std::make_unique<Arm>(config, graph, config.enforce_capability));
      if (options.overhead) arms.push_back(std::make_unique<Arm>(config, graph, false));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kEngineUnavailable, e.what());
    }

    for (auto& arm : arms) {
      if (config.cache_capacity > 0) {
        for (auto id : trace.hot) arm->run(Op{OpKind::kRead, id});
      }
      for (const auto& op : trace.warmup) arm->run(op);
      arm->flush();
      arm->reset_logs();
    }

    std::vector<cas::WriteStats> before;
    for (auto& arm : arms) before.push_back(arm->engine().store().stats());
    const auto block = config.block_ops;
    for (std::size_t start = 0, b = 0; start < trace.window.size(); start += block, ++b) {
      const auto end = std::min(trace.window.size(), start + block);
      // Alternate which arm goes first so drift hits both equally.
      for (std::size_t i = 0; i < arms.size(); ++i) {
        auto& arm = arms[(i + b) % arms.size()];
        for (auto k = start; k < end; ++k) arm->run(trace.window[k]);
      }
    }
    for (auto& arm : arms) arm->flush();

    auto& measured = *arms.front();
    const auto after = measured.engine().store().stats();
    TrialResult r;
    r.logical_bytes = after.logical_bytes - before.front().logical_bytes;
    r.physical_bytes = after.physical_bytes - before.front().physical_bytes;
    r.wa = r.logical_bytes ? static_cast<double>(r.physical_bytes) / static_cast<double>(r.logical_bytes) : kNaN;
    r.sa = static_cast<double>(after.physical_bytes) / static_cast<double>(measured.live_bytes());

    std::vector<double> traversals, all;
    for (const auto& s : measured.samples()) {
      all.push_back(s.lat_ms);
      r.busy_seconds += s.lat_ms / 1000.0;
      if (s.kind == OpKind::kTraverse) traversals.push_back(s.lat_ms);
    }
    r.ops = all.size();
    const auto trimmed = trim(traversals);
    r.p95_traverse_ms = trimmed.empty() ? kNaN : nearest_rank(trimmed, 0.95);
    std::sort(all.begin(), all.end());
    r.p995_ms = all.empty() ? kNaN : nearest_rank(all, 0.995);

    std::size_t hit_count = 0;
    for (const auto& a : measured.reads()) hit_count += a.hit;
    r.h_cache = measured.reads().empty() ? kNaN
                                         : static_cast<double>(hit_count) / static_cast<double>(measured.reads().size());
    r.overhead = options.overhead
                     ? trimmed_mean_latency(measured.samples()) / trimmed_mean_latency(arms.back()->samples()) - 1.0
                     : kNaN;

    p95s.push_back(r.p95_traverse_ms);
    was.push_back(r.wa);
    hits.push_back(r.h_cache);
    overheads.push_back(r.overhead);
    p995s.push_back(r.p995_ms);
    report.trials.push_back(r);
    auto& log = measured.reads();
    report.reads.insert(report.reads.end(), log.begin(), log.end());
    if (trial == 0) report.first_trial = measured.samples();
  }

  report.latency = make_value("3-hop Traversal Latency (p95)", "<=13.0", 13.0, true, false, 3.40, p95s);
  report.wa = make_value("Write Amplification", "<=1.15", 1.15, true, true, 0.13, was);
  report.h_cache = make_value("Cache Hit Rate", ">=0.99", 0.99, false, true, 0.99, hits);
  report.overhead = make_value("Security Overhead", "<=0.10", 0.10, true, options.overhead, 0.0247, overheads);
  report.p995_ms = mean(p995s);
  return report;
}

std::string kpi_csv(const KpiReport& report) {
  std::string out = "metric,target,mean,ci_lo,ci_hi,pass\n";
  char line[256];
  for (const auto* v : report.rows()) {
    const char* fmt = v == &report.latency ? "%s,%s,%.3f,%.3f,%.3f,%s\n" : "%s,%s,%.6f,%.6f,%.6f,%s\n";
    std::snprintf(line, sizeof(line), fmt, v->metric.c_str(), v->target_text.c_str(), v->mean, v->ci_lo, v->ci_hi,
                  v->pass ? "true" : "false");
    out += line;
  }
  return out;
}

std::string latency_csv(const KpiReport& report) {
  std::string out = "op,lat_ms,hit,depth\n";
  char line[96];
  for (const auto& s : report.first_trial) {
    if (s.kind == OpKind::kRead) {
      std::snprintf(line, sizeof(line), "read,%.6f,%d,%u\n", s.lat_ms, s.hit ? 1 : 0, s.depth);
    } else {
      std::snprintf(line, sizeof(line), "%s,%.6f,,\n", std::string(to_string(s.kind)).c_str(), s.lat_ms);
    }
    out += line;
  }
  return out;
}

std::string amplification_csv(const KpiReport& report) {
  std::string out = "trial,logical_bytes,physical_bytes,wa,sa\n";
  char line[160];
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    std::snprintf(line, sizeof(line), "%zu,%llu,%llu,%.6f,%.6f\n", i, static_cast<unsigned long long>(t.logical_bytes),
                  static_cast<unsigned long long>(t.physical_bytes), t.wa, t.sa);
    out += line;
  }
  return out;
}

std::string throughput_csv(const KpiReport& report) {
  std::string out = "trial,ops,busy_s,ops_per_s\n";
  char line[128];
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    std::snprintf(line, sizeof(line), "%zu,%zu,%.6f,%.1f\n", i, t.ops, t.busy_seconds,
                  t.busy_seconds > 0 ? static_cast<double>(t.ops) / t.busy_seconds : 0.0);
    out += line;
  }
  return out;
}

std::string kpi_summary(const KpiReport& report) {
  std::ostringstream out;
  char line[320];
  for (const auto* v : report.rows()) {
    const bool ms = v == &report.latency;
    std::snprintf(line, sizeof(line), ms ? "%-31s %10.3f [%.3f, %.3f] target %s margin %+.1f%% ref %.2f %s\n"
                                         : "%-31s %10.4f [%.4f, %.4f] target %s margin %+.1f%% ref %.4f %s\n",
                  v->metric.c_str(), v->mean, v->ci_lo, v->ci_hi, v->target_text.c_str(), 100.0 * v->margin,
                  v->reference, !v->gating ? "INFO" : v->pass ? "PASS" : "FAIL");
    out << line;
  }
  return out.str();
}

}  // namespace tetra::bench
