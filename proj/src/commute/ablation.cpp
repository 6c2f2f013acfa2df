#include "tetra/commute/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "tetra/bench/workload.hpp"
#include "tetra/core/lineage.hpp"

namespace tetra::commute {

namespace {

constexpr double kRateBound = 0.01;

const CommutationRow* row_of(std::span<const CommutationRow> rates, Projection p) {
  for (const auto& r : rates) {
    if (r.projection == p) return &r;
  }
  return nullptr;
}

std::string rate_detail(const CommutationRow& r) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "rate %.4f, CI upper %.4f", r.rate, r.ci_hi);
  return buf;
}

// A 100-commit chain of value and edge edits, then a full lineage check.
core::LineageVerdict lineage_probe(std::uint64_t seed) {
  cas::PackStore store;
  core::Lineage lineage(store);
  const auto g = bench::gen_graph(32, 2, seed);
  lineage.commit(core::observation_from(g), 1);
  bench::Rng rng(seed);
  for (Tick t = 2; t <= 100; ++t) {
    graph::Observation obs;
    const NodeId id = rng.below(32);
    obs.push(graph::SetValue{id, store.put(to_bytes("v" + std::to_string(rng.next())))});
    graph::Edge extra{id, rng.below(32), "extra"};
    if (rng.chance(0.3) && !lineage.head_view().has_edge(extra)) obs.push(graph::AddEdge{extra});
    lineage.commit(obs, t);
  }
  return lineage.check();
}

bool content_probe(const Config& config, std::uint64_t seed, std::string& detail) {
  World world(config, StateShape{}, seed);
  Event put{EventKind::kPut};
  put.text = "probe-payload";
  world.run(std::span(&put, 1));
  const auto once = world.serialize_full();
  const auto outcome = world.run(std::span(&put, 1));
  const bool same = world.serialize_full() == once && outcome.front().ok();
  detail = same ? "duplicate put left the store unchanged" : "duplicate put stored a second copy";
  return same;
}

std::optional<capability::Capability> find_subject(const World& world, std::string_view subject) {
  for (const auto& c : world.universe(Projection::kPi5).caps) {
    if (c.subject == subject) return c;
  }
  return std::nullopt;
}

bool capability_probe(const Config& config, std::uint64_t seed, std::string& detail) {
  World world(config, StateShape{}, seed);
  const auto root = world.universe(Projection::kPi5).caps.front();
  auto grant = [&](capability::CapId parent, capability::Rights rights, std::string subject) {
    Event e{EventKind::kGrant};
    e.target = parent;
    e.rights = rights;
    e.ttl = 1'000'000;
    e.text = std::move(subject);
    return world.run(std::span(&e, 1)).front();
  };
  grant(root.id, capability::Rights::kRead, "probe-parent");
  const auto parent = find_subject(world, "probe-parent");
  if (!parent) {
    detail = "probe grant failed";
    return false;
  }
  grant(parent->id, capability::Rights::kRead, "probe-child");
  const bool refused = !grant(parent->id, capability::Rights::kAdmin, "probe-escalated").ok();

  Event revoke{EventKind::kRevoke};
  revoke.target = parent->id;
  world.run(std::span(&revoke, 1));
  const bool cascaded = !find_subject(world, "probe-child").has_value();
  detail = std::string(refused ? "escalation refused" : "escalation accepted") + ", " +
           (cascaded ? "descendant revoked" : "descendant still live");
  return refused && cascaded;
}

}  // namespace

std::vector<PreservationCheck> preservation_checks(const Config& config, std::span<const CommutationRow> rates,
                                                   std::uint64_t seed) {
  std::vector<PreservationCheck> out;
  for (auto p : kAllProjections) {
    PreservationCheck c{p};
    if (p == Projection::kPi4) {
      c.preserved = content_probe(config, bench::derive_seed(seed, "probe-pi4"), c.detail);
    } else if (p == Projection::kPi5) {
      c.preserved = capability_probe(config, bench::derive_seed(seed, "probe-pi5"), c.detail);
    } else {
      const auto* r = row_of(rates, p);
      if (!r) throw Error(ErrorCode::kInvalidParams, "no rate for " + std::string(to_string(p)));
      c.preserved = r->ci_hi < kRateBound;
      c.detail = rate_detail(*r);
      if (p == Projection::kPi2) {
        if (!config.lineage) {
          c.preserved = false;
          c.detail += ", no lineage to check";
        } else {
          const auto v = lineage_probe(bench::derive_seed(seed, "probe-pi2"));
          c.preserved = c.preserved && v.accepted && v.replay_diff == 0;
          c.detail += v.accepted ? ", lineage accepted" : ", lineage rejected: " + v.reason;
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::size_t preserved_count(std::span<const PreservationCheck> checks) {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.preserved;
  return n;
}

bench::WorkloadConfig without(const bench::WorkloadConfig& workload, std::string_view component) {
  auto w = workload;
  if (component == "ownership") {
    w.ownership = false;
  } else if (component == "capability") {
    w.enforce_capability = false;
  } else if (component == "cas") {
    w.deduplicate = false;
  } else if (component == "graph-split") {
    w.graph_split = false;
  } else if (component != "none" && !component.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "unknown component: " + std::string(component));
  }
  return w;
}

MeasureParams measure_params(const bench::WorkloadConfig& workload) {
  MeasureParams p;
  p.horizon = workload.horizon;
  p.reps = workload.reps;
  p.seed = workload.seed;
  return p;
}

AblationRow ablate(std::string_view component, const bench::WorkloadConfig& workload, const bench::KpiReport* full) {
  AblationRow row;
  row.component = component.empty() ? "none" : std::string(component);
  row.config = Config::without(component);
  const auto params = measure_params(workload);
  for (auto p : kAllProjections) row.rates.push_back(measure(p, params, row.config));
  row.checks = preservation_checks(row.config, row.rates, workload.seed);
  row.preservation = static_cast<double>(preserved_count(row.checks)) / static_cast<double>(row.checks.size());

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  row.wa = row.wa_delta = row.p995_ms = row.p995_delta_ms = kNaN;
  if (full) {
    const auto ablated = row.component == "none" ? *full : bench::run_kpi(without(workload, component), {false});
    row.wa = ablated.wa.mean;
    row.wa_delta = ablated.wa.mean - full->wa.mean;
    row.p995_ms = ablated.p995_ms;
    row.p995_delta_ms = ablated.p995_ms - full->p995_ms;
  }
  return row;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
  std::string out = "component,config,preserved,preservation,wa,wa_delta,p995_ms,p995_delta_ms\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%s,%zu/%zu,%.6f,%.6f,%.6f,%.3f,%.3f\n", r.component.c_str(),
                  r.config.name().c_str(), preserved_count(r.checks), r.checks.size(), r.preservation, r.wa,
                  r.wa_delta, r.p995_ms, r.p995_delta_ms);
    out += line;
  }
  return out;
}

}  // namespace tetra::commute
