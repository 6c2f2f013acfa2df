// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "tetra/bench/config.hpp"
#include "tetra/bench/epsilon.hpp"
#include "tetra/bench/kpi.hpp"
#include "tetra/bench/workload.hpp"
#include "tetra/cas/pack.hpp"
#include "tetra/cli/cli.hpp"
#include "tetra/commute/harness.hpp"
#include "tetra/core/lineage.hpp"
#include "tetra/ownership/stress.hpp"

#ifndef TETRA_SOURCE_DIR
#define TETRA_SOURCE_DIR "."
#endif

using namespace tetra;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  Bytes b(1 + rng() % max_len);
  for (auto& x : b) x = static_cast<std::byte>(rng());
  return b;
}

// A random legal observation over `base` on node ids below `ids`.
graph::Observation random_observation(std::mt19937_64& rng, const graph::Graph& base, std::size_t ids, int ops) {
  graph::Graph scratch = base;
  graph::Observation obs;
  for (int i = 0; i < ops; ++i) {
    const NodeId a = rng() % ids, b = rng() % ids;
    graph::Mutation m;
    switch (rng() % 5) {
      case 0:
        if (scratch.has_node(a)) continue;
        m = graph::AddNode{a, rng() % 2 ? "p" : "q"};
        break;
      case 1:
        if (!scratch.has_node(a)) continue;
        m = graph::RemoveNode{a};
        break;
      case 2:
        if (!scratch.has_node(a)) continue;
        m = graph::SetLabel{a, "l" + std::to_string(rng() % 4)};
        break;
      case 3:
        if (!scratch.has_node(a) || !scratch.has_node(b) || scratch.has_edge({a, b, "e"})) continue;
        m = graph::AddEdge{{a, b, "e"}};
        break;
      default:
        if (!scratch.has_node(a)) continue;
        m = graph::SetValue{a, cas::sha256(to_bytes(std::to_string(rng() % 9)))};
    }
    graph::Observation({m}).apply(scratch);
    obs.push(m);
  }
  return obs;
}

Outcome cas_idempotence() {
  std::mt19937_64 rng(1);
  cas::PackStore store;
  std::vector<Bytes> pool;
  for (int i = 0; i < 1000; ++i) {
    pool.push_back(random_bytes(rng, 256));
    store.put(pool.back());
  }
  std::size_t violations = 0;
  constexpr int kTrials = 100'000;
  for (int i = 0; i < kTrials; ++i) {
    const auto& p = pool[rng() % pool.size()];
    const auto before = store.stats().physical_bytes;
    const auto h = store.put(p);
    if (store.stats().physical_bytes != before || h != cas::sha256(p)) ++violations;
  }
  return {violations == 0, fmt("%d duplicate puts, %zu wrote bytes", kTrials, violations)};
}

Outcome pack_monoid() {
  std::mt19937_64 rng(2);
  auto random_pack = [&] {
    cas::Pack p;
    const auto n = rng() % 6;
    for (std::uint64_t i = 0; i < n; ++i) p.add(to_bytes("item-" + std::to_string(rng() % 12)));
    return p;
  };
  std::size_t failures = 0;
  const cas::Pack empty;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_pack(), b = random_pack(), c = random_pack();
    const auto left = cas::pack_concat(cas::pack_concat(a, b), c).digest();
    const auto right = cas::pack_concat(a, cas::pack_concat(b, c)).digest();
    const bool identity =
        cas::pack_concat(empty, a).digest() == a.digest() && cas::pack_concat(a, empty).digest() == a.digest();
    failures += !(left == right) || !identity;
  }
  return {failures == 0, fmt("1000 triples, %zu failures", failures)};
}

Outcome capability_safety() {
  using namespace capability;
  std::mt19937_64 rng(3);
  std::size_t escalations = 0, descendants = 0, still_valid = 0, refused = 0;
  for (int tree = 0; tree < 10'000; ++tree) {
    CapabilityTable t;
    std::vector<Capability> caps{t.mint_root(Region::range(0, 1000), Rights::kAdmin)};
    std::map<CapId, CapId> parent_of;
    for (int i = 0; i < 8; ++i) {
      const auto& p = caps[rng() % caps.size()];
      const NodeId lo = rng() % 1000;
      const auto region = Region::range(lo, lo + 1 + rng() % 400);
      const auto rights = kAllRights[rng() % kAllRights.size()];
      try {
        caps.push_back(t.grant(p, region, rights, 1 + rng() % 1000));
        parent_of[caps.back().id] = p.id;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIllegalEscalation) ++refused;
      }
    }
    for (const auto& c : caps) {
      for (auto id : c.proof) {
        const auto anc = t.find(id);
        if (!anc || c.rights > anc->rights || !c.region.subset_of(anc->region) || c.expiry > anc->expiry) {
          ++escalations;
        }
      }
    }
    escalations += replay_audit(t.audit_log()).escalations;
    if (caps.size() < 2) continue;
    const auto victim = caps[1 + rng() % (caps.size() - 1)];
    t.revoke(victim);
    for (const auto& c : caps) {
      bool below = false;
      for (CapId x = c.id;; x = parent_of[x]) {
        if (x == victim.id) below = true;
        if (!parent_of.contains(x)) break;
      }
      if (!below) continue;
      ++descendants;
      still_valid += t.verify(c, c.region, Rights::kNone, 0).accepted;
    }
  }
  return {escalations == 0 && still_valid == 0 && refused > 0,
          fmt("10000 trees, %zu escalations, %zu illegal grants refused, %zu/%zu revoked descendants rejected",
              escalations, refused, descendants - still_valid, descendants)};
}

Outcome ownership_exclusivity() {
  ownership::StressParams p;
  p.workers = 8;
  p.ops = 100'000;
  const auto r = ownership::stress_leases(p);
  return {r.violations == 0 && r.ops >= 100'000,
          fmt("8 workers, %zu lease ops, %zu violations", r.ops, r.violations)};
}

Outcome lineage_replay() {
  std::mt19937_64 rng(5);
  std::size_t rejected_clean = 0, diff = 0, tamper_missed = 0, tampers = 0;
  for (int chain = 0; chain < 3; ++chain) {
    cas::PackStore store;
    core::Lineage lineage(store);
    for (Tick t = 1; t <= 1000; ++t) lineage.commit(random_observation(rng, lineage.head_view(), 40, 3), t);
    const auto verdict = lineage.check();
    rejected_clean += !verdict.accepted;
    diff += verdict.replay_diff;
    const auto& rows = lineage.rows();
    for (int i = 0; i < 100; ++i) {
      const auto target = rows[rng() % rows.size()].hash;
      const auto byte = rng();
      const auto tampered = core::lineage_check(
          lineage.head()->hash,
          [&](const cas::ContentHash& h) {
            auto bytes = store.get(h);
            if (h == target) bytes[byte % bytes.size()] ^= std::byte{0x01};
            return bytes;
          },
          store);
      ++tampers;
      tamper_missed += tampered.accepted;
    }
  }
  return {rejected_clean == 0 && diff == 0 && tamper_missed == 0,
          fmt("3 chains x 1000 commits, replay diff %zu, %zu/%zu tampered bytes detected", diff,
              tampers - tamper_missed, tampers)};
}

Outcome theorem1() {
  commute::MeasureParams params;
  params.horizon = 1000;
  params.reps = 30;
  params.seed = 42;
  const auto s = commute::theorem1_suite(params);
  using commute::Projection;
  const auto& full = s.composed;
  auto row = [&](Projection p) -> const commute::CommutationRow& { return full[commute::index_of(p)]; };
  bool ok = row(Projection::kPi4).nc_count == 0 && row(Projection::kPi5).ci_lo > 0.0;
  for (auto p : {Projection::kPi1, Projection::kPi2, Projection::kPi3, Projection::kPi6}) ok = ok && row(p).ci_hi < 0.01;
  ok = ok && s.baseline_nc.size() >= 4;
  std::string nc;
  for (auto p : s.baseline_nc) nc += std::string(commute::to_string(p)) + " ";
  return {ok, fmt("pi4 nc=%llu, pi5 rate %.4f [%.4f, %.4f], max other ci_hi %.4f, baseline non-commuting { %s}",
                  static_cast<unsigned long long>(row(Projection::kPi4).nc_count), row(Projection::kPi5).rate,
                  row(Projection::kPi5).ci_lo, row(Projection::kPi5).ci_hi,
                  std::max({row(Projection::kPi1).ci_hi, row(Projection::kPi2).ci_hi, row(Projection::kPi3).ci_hi,
                            row(Projection::kPi6).ci_hi}),
                  nc.c_str())};
}

Outcome oracle_equivalence() {
  std::size_t pairs = 0, agree = 0;
  for (const auto& config : {commute::Config::full(), commute::Config::baseline(), commute::Config::without("cas"),
                             commute::Config::without("capability")}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto r = commute::exhaustive_oracle(config, seed);
      pairs += r.pairs;
      agree += r.agreements;
    }
  }
  return {pairs > 0 && agree == pairs, fmt("%zu/%zu pairs agree", agree, pairs)};
}

Outcome epsilon_fit(const bench::KpiReport& defaults) {
  const auto e = bench::estimate_epsilon(defaults.reads, 1000, bench::derive_seed(defaults.config.seed, "bootstrap"));
  const auto s = bench::estimate_epsilon(bench::synthetic_log(100'000, 0.1, 3, 11), 1000, 11);
  const bool synthetic_ok = s.ci_lo <= 0.3 && 0.3 <= s.ci_hi;
  return {e.eps <= 0.05 && e.rel_error <= 0.10 && synthetic_ok,
          fmt("H=%.4f c_k=%.3f eps=%.4f [%.4f, %.4f], steps %.4f vs model %.4f (rel err %.4f); synthetic eps=%.4f "
              "[%.4f, %.4f]",
              e.h_cache, e.c_k, e.eps, e.ci_lo, e.ci_hi, e.mean_steps, e.model_steps, e.rel_error, s.eps, s.ci_lo,
              s.ci_hi)};
}

Outcome kpi_targets(const bench::KpiReport& defaults, const bench::KpiReport& hot) {
  const bool ok = defaults.overhead.pass && defaults.wa.pass && hot.h_cache.pass;
  return {ok, fmt("overhead %.4f (<=0.10), WA %.4f (<=1.15), hot-set H %.4f (>=0.99); p95 3-hop %.3f ms vs 13.0 "
                  "(informative)",
                  defaults.overhead.mean, defaults.wa.mean, hot.h_cache.mean, defaults.latency.mean)};
}

Outcome naturality() {
  std::mt19937_64 rng(10);
  std::size_t equal = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = bench::gen_graph(10 + rng() % 30, 1 + rng() % 2, rng());
    const NodeId lo = rng() % 20;
    const auto region = capability::Region::range(lo, lo + 1 + rng() % 25);
    const auto obs = random_observation(rng, g, 45, 6);
    graph::Graph final_graph = g;
    obs.apply(final_graph);

    cas::PackStore sa, sb;
    core::Lineage a(sa), b(sb);
    a.commit(core::observation_from(g), 1);
    const auto committed = a.commit(obs, 2);
    const auto after = core::restrict(*committed, region, sa);
    const auto first = b.commit(core::observation_from(final_graph.restrict(region)), 1);
    equal += core::obs_equiv(after, *first) && a.view(after) == b.view(*first);
  }
  return {equal == 1000, fmt("%zu/1000 triples commute", equal)};
}

Outcome compaction() {
  std::mt19937_64 rng(11);
  std::size_t equivalent = 0, bounded = 0, total = 0;
  for (std::size_t k : {1u, 2u, 4u}) {
    for (int i = 0; i < 1000; ++i) {
      cas::StoreOptions opts;
      opts.segment_bytes = 256 + rng() % 1024;
      cas::PackStore store(opts);
      core::LineageOptions lopts;
      lopts.max_chain = 1 + rng() % 4;
      core::Lineage lineage(store, lopts);
      const auto commits = 2 + rng() % 6;
      for (Tick t = 1; t <= commits; ++t) lineage.commit(random_observation(rng, lineage.head_view(), 30, 8), t);
      const auto before = lineage.head();
      const auto after = lineage.compact(*before, k);
      ++total;
      equivalent += core::obs_equiv(*before, *after) && lineage.view(*after) == lineage.view(*before);
      // Pack-scan: which segment holds each chunk the compacted root points at.
      std::map<cas::ContentHash, std::size_t> where;
      for (std::size_t s = 0; s < store.segment_count(); ++s) {
        const auto pack = cas::Pack::parse(store.segment_bytes(s));
        for (const auto& e : pack.entries()) where[e.hash] = s;
      }
      std::set<std::size_t> segments;
      for (const auto& [id, entry] : after->root) {
        for (const auto& f : entry.fragments) segments.insert(where.at(f));
      }
      bounded += segments.size() <= k && after->fragment_count <= k;
    }
  }
  return {equivalent == total && bounded == total,
          fmt("k in {1,2,4}: %zu/%zu equivalent, %zu/%zu within k", equivalent, total, bounded, total)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops timing columns (by header name) and timing rows of kpi.csv.
std::string without_timing(const std::string& name, const std::string& csv) {
  static const std::set<std::string> kTimingColumns{"lat_ms", "busy_s", "ops_per_s", "p995_ms", "p995_delta_ms"};
  std::istringstream in(csv);
  std::string line, out;
  std::vector<bool> keep;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (header) {
      for (const auto& c : cells) keep.push_back(!kTimingColumns.contains(c));
      header = false;
    }
    if (name == "kpi.csv" && (line.starts_with("3-hop") || line.starts_with("Security"))) continue;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i >= keep.size() || keep[i]) out += cells[i] + ",";
    }
    out += "\n";
  }
  return out;
}

Outcome cli_determinism() {
  const auto root = fs::temp_directory_path() / ("tetra-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const auto conf = root / "small.conf";
  std::ofstream(conf) << "nodes=500\nobjects=5\nwarmup_ops=1000\nwindow_ops=4000\ntrials=3\nblock_ops=500\n"
                         "commit_every=200\ncache_capacity=600\nhorizon=40\nreps=30\n";
  std::size_t compared = 0, differing = 0;
  std::string bad;
  for (const char* cmd : {"bench", "epsilon", "commute", "ablate", "selftest"}) {
    for (const char* run : {"a", "b"}) {
      std::ostringstream out, err;
      cli::run({cmd, "--config", conf.string(), "--seed", "42", "--out", (root / cmd / run).string()}, out, err);
    }
    for (const auto& entry : fs::directory_iterator(root / cmd / "a")) {
      const auto name = entry.path().filename().string();
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      if (without_timing(name, slurp(entry.path())) != without_timing(name, slurp(root / cmd / "b" / name))) {
        ++differing;
        bad += std::string(cmd) + "/" + name + " ";
      }
    }
  }
  fs::remove_all(root);
  return {compared >= 11 && differing == 0, fmt("%zu CSV files compared, %zu differ %s", compared, differing, bad.c_str())};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  std::optional<bench::KpiReport> defaults, hot;
  auto default_bench = [&]() -> const bench::KpiReport& {
    if (!defaults) defaults = bench::run_kpi(bench::load_config(TETRA_SOURCE_DIR "/configs/default.conf"));
    return *defaults;
  };
  auto hot_bench = [&]() -> const bench::KpiReport& {
    if (!hot) hot = bench::run_kpi(bench::load_config(TETRA_SOURCE_DIR "/configs/hot_set.conf"), {.overhead = false});
    return *hot;
  };

  criteria.emplace_back("CAS idempotence", cas_idempotence);
  criteria.emplace_back("Pack monoid", pack_monoid);
  criteria.emplace_back("Capability safety", capability_safety);
  criteria.emplace_back("Ownership exclusivity", ownership_exclusivity);
  criteria.emplace_back("Lineage replay", lineage_replay);
  criteria.emplace_back("Anti-commutativity reduction", theorem1);
  criteria.emplace_back("Small-instance oracle equivalence", oracle_equivalence);
  criteria.emplace_back("Read-bound model fit", [&] { return epsilon_fit(default_bench()); });
  criteria.emplace_back("KPI targets", [&] { return kpi_targets(default_bench(), hot_bench()); });
  criteria.emplace_back("Naturality square", naturality);
  criteria.emplace_back("Compaction equivalence", compaction);
  criteria.emplace_back("CLI determinism", cli_determinism);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
