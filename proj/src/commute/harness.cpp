#include "tetra/commute/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace tetra::commute {

namespace {

bool all_ok(const std::vector<Outcome>& outcomes) {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.ok(); });
}

// Outcomes belong to events, not positions.
bool same_outcomes(const Event& e1, const Event& e2, const std::vector<Outcome>& forward,
                   const std::vector<Outcome>& backward) {
  if (e1 == e2) {
    auto a = forward, b = backward;
    auto key = [](const Outcome& o) { return to_string(o); };
    std::sort(a.begin(), a.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    std::sort(b.begin(), b.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    return a == b;
  }
  return forward[0] == backward[1] && forward[1] == backward[0];
}

std::string fixed(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << v;
  return out.str();
}

}  // namespace

PairResult check_pair(const Event& e1, const Event& e2, const World& state) {
  PairResult result;
  auto a = state.clone();
  auto b = state.clone();
  const std::array<Event, 2> forward = {e1, e2};
  const std::array<Event, 2> backward = {e2, e1};
  result.forward = a->run(forward);
  result.backward = b->run(backward);
  const bool legal_a = all_ok(result.forward);
  const bool legal_b = all_ok(result.backward);
  if (!legal_a && !legal_b) throw Error(ErrorCode::kIllegalFromState, to_string(e1) + " / " + to_string(e2));
  if (legal_a != legal_b) {
    result.verdict = PairVerdict::kDiverge;
    result.order_dependent_legality = true;
  } else if (!same_outcomes(e1, e2, result.forward, result.backward) || !equivalent(a->observe(), b->observe())) {
    result.verdict = PairVerdict::kDiverge;
  }
  result.after = std::move(a);
  return result;
}

NodeId EventGenerator::hot_node(const std::vector<NodeId>& nodes) {
  bench::ZipfSampler zipf(1.0, nodes.size());
  return nodes[zipf.sample(rng_) - 1];
}

Event EventGenerator::draw(const Universe& u) {
  Event e;
  switch (projection_) {
    case Projection::kPi1:
      if (u.nodes.empty() || rng_.chance(0.55)) {
        e.kind = EventKind::kInsert;
        e.node = u.fresh + rng_.below(3);
        e.text = rng_.pick(u.labels);
        e.attach = !u.nodes.empty() && rng_.chance(0.5);
        if (e.attach) e.other = hot_node(u.nodes);
      } else {
        e.kind = EventKind::kDelete;
        e.node = hot_node(u.nodes);
      }
      break;
    case Projection::kPi2:
      if (rng_.chance(0.75)) {
        e.kind = EventKind::kMerge;
        const auto n = 1 + rng_.below(2);
        for (std::uint64_t i = 0; i < n; ++i) {
          e.items.emplace_back(hot_node(u.nodes), "v" + std::to_string(rng_.below(4)));
        }
      } else {
        e.kind = EventKind::kCompact;
      }
      break;
    case Projection::kPi3:
      if (rng_.chance(0.5)) {
        e.kind = EventKind::kTraverse;
        e.node = hot_node(u.nodes);
        e.hops = 1 + static_cast<unsigned>(rng_.below(3));
        break;
      }
      e.kind = EventKind::kUpdate;
      e.node = hot_node(u.nodes);
      switch (rng_.below(3)) {
        case 0:
          e.update = UpdateKind::kSetLabel;
          e.text = rng_.pick(u.labels);
          break;
        case 1:
          e.update = UpdateKind::kAddEdge;
          e.other = hot_node(u.nodes);
          if (e.other == e.node ||
              std::find(u.edges.begin(), u.edges.end(), std::pair(e.node, e.other)) != u.edges.end()) {
            e.update = UpdateKind::kRemoveEdge;
          }
          if (e.other != e.node) break;
          [[fallthrough]];
        default:
          if (u.edges.empty()) {
            e.update = UpdateKind::kSetLabel;
            e.text = rng_.pick(u.labels);
          } else {
            e.update = UpdateKind::kRemoveEdge;
            std::tie(e.node, e.other) = rng_.pick(u.edges);
          }
      }
      break;
    case Projection::kPi4:
      if (u.contents == 0 || rng_.chance(0.6)) {
        e.kind = EventKind::kPut;
        e.text = "blob-" + std::to_string(rng_.below(u.contents + 4));
      } else {
        e.kind = EventKind::kGet;
        e.target = rng_.below(u.contents);
      }
      break;
    case Projection::kPi5: {
      std::vector<std::size_t> revocable;
      for (std::size_t i = 1; i < u.caps.size(); ++i) revocable.push_back(i);
      if (revocable.empty() || rng_.chance(0.6)) {
        bench::ZipfSampler zipf(1.0, u.caps.size());
        const auto& parent = u.caps[zipf.sample(rng_) - 1];
        e.kind = EventKind::kGrant;
        e.target = parent.id;
        e.rights = capability::kAllRights[rng_.below(static_cast<std::uint64_t>(parent.rights) + 1)];
        e.ttl = 50 + rng_.below(150);
        e.text = "g" + std::to_string(rng_.below(1'000'000));
      } else {
        bench::ZipfSampler zipf(1.0, revocable.size());
        e.kind = EventKind::kRevoke;
        e.target = u.caps[revocable[zipf.sample(rng_) - 1]].id;
      }
      break;
    }
    case Projection::kPi6: {
      std::vector<std::uint64_t> free;
      for (std::uint64_t c = 0; c < u.clients; ++c) {
        if (!u.holds.contains(c)) free.push_back(c);
      }
      if (!u.holds.empty() && (free.empty() || rng_.chance(0.4))) {
        e.kind = EventKind::kReleaseLease;
        auto it = u.holds.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng_.below(u.holds.size())));
        e.client = it->first;
      } else {
        e.kind = EventKind::kAcquireLease;
        e.client = rng_.pick(free);
        e.target = rng_.below(u.objects);
        e.write = rng_.chance(0.5);
      }
      break;
    }
  }
  return e;
}

Interval wilson(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw Error(ErrorCode::kInvalidParams, "no trials");
  if (successes > trials) throw Error(ErrorCode::kInvalidParams, "more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Exact at the boundaries.
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  return ci;
}

CommutationRow measure(Projection projection, const MeasureParams& params, const Config& config) {
  if (params.reps < 30) throw Error(ErrorCode::kInvalidConfig, "at least 30 repetitions are needed");
  if (params.horizon == 0 || params.redraw_every == 0) throw Error(ErrorCode::kInvalidConfig, "empty horizon");
  CommutationRow row;
  row.projection = projection;
  row.config = config.name();
  const std::string stream(to_string(projection));
  constexpr std::size_t kMaxDraws = 200;

  for (std::size_t rep = 0; rep < params.reps; ++rep) {
    std::uint64_t epoch = 0;
    auto fresh = [&] {
      return std::make_unique<World>(config, params.shape,
                                     bench::derive_seed(params.seed, "state-" + stream, rep * 1'000'003 + epoch++));
    };
    auto world = fresh();
    EventGenerator gen(projection, bench::derive_seed(params.seed, "events-" + stream, rep));
    for (std::size_t pair = 0; pair < params.horizon; ++pair) {
      if (pair > 0 && pair % params.redraw_every == 0) world = fresh();
      std::optional<PairResult> result;
      while (!result) {
        for (std::size_t draw = 0; draw < kMaxDraws && !result; ++draw) {
          const auto u = world->universe(projection);
          const auto e1 = gen.draw(u);
          const auto e2 = gen.draw(u);
          try {
            result = check_pair(e1, e2, *world);
          } catch (const Error& err) {
            if (err.code() != ErrorCode::kIllegalFromState) throw;
            ++row.illegal_draws;
          }
        }
        if (!result) world = fresh();
      }
      ++row.trials;
      if (result->verdict == PairVerdict::kDiverge) ++row.nc_count;
      if (result->order_dependent_legality) ++row.order_dependent;
      world = std::move(result->after);
    }
  }
  row.rate = static_cast<double>(row.nc_count) / static_cast<double>(row.trials);
  const auto ci = wilson(row.nc_count, row.trials);
  row.ci_lo = ci.lo;
  row.ci_hi = ci.hi;
  return row;
}

Theorem1Summary theorem1_suite(const MeasureParams& params) {
  Theorem1Summary s;
  for (auto p : kAllProjections) {
    s.baseline.push_back(measure(p, params, Config::baseline()));
    s.composed.push_back(measure(p, params, Config::full()));
    if (s.baseline.back().non_commuting()) s.baseline_nc.push_back(p);
    if (s.composed.back().non_commuting()) s.composed_nc.push_back(p);
    if (s.baseline.back().non_commuting() && !s.composed.back().non_commuting()) s.resolved.push_back(p);
  }
  s.holds = s.composed_nc == std::vector<Projection>{Projection::kPi5} && s.baseline_nc.size() >= 4;
  return s;
}

std::string Theorem1Summary::report() const {
  auto list = [](const std::vector<Projection>& ps) {
    std::string out = "{";
    for (std::size_t i = 0; i < ps.size(); ++i) out += (i ? "," : "") + std::string(to_string(ps[i]));
    return out + "}";
  };
  std::ostringstream out;
  out << "baseline non-commuting " << baseline_nc.size() << "/6 " << list(baseline_nc) << "; composed "
      << composed_nc.size() << "/6 " << list(composed_nc) << "; resolved by composition " << resolved.size()
      << "/6 " << list(resolved) << "; headline 4/6 -> 1/6 counts the resolved layers plus the residual";
  return out.str();
}

std::string commutation_csv(std::span<const CommutationRow> rows) {
  std::ostringstream out;
  out << "projection,trials,nc_count,rate,ci_lo,ci_hi,config\n";
  for (const auto& r : rows) {
    out << to_string(r.projection) << ',' << r.trials << ',' << r.nc_count << ',' << fixed(r.rate) << ','
        << fixed(r.ci_lo) << ',' << fixed(r.ci_hi) << ',' << r.config << '\n';
  }
  return out.str();
}

std::string heatmap_csv(std::span<const CommutationRow> rows) {
  std::ostringstream out;
  out << "projection,config,rate\n";
  for (const auto& r : rows) out << to_string(r.projection) << ',' << r.config << ',' << fixed(r.rate) << '\n';
  return out.str();
}

StateShape small_shape() {
  StateShape shape;
  shape.nodes = 5;
  shape.ba_m = 1;
  shape.objects = 3;
  shape.clients = 2;
  shape.contents = 2;
  shape.grants = 2;
  shape.owner_width = 2;
  return shape;
}

std::unique_ptr<World> small_world(const Config& config, std::uint64_t seed) {
  auto world = std::make_unique<World>(config, small_shape(), seed);
  Event hold;
  hold.kind = EventKind::kAcquireLease;
  hold.target = 0;
  hold.client = 0;
  world->run(std::span(&hold, 1));
  return world;
}

std::vector<Event> small_event_set(const World& world) {
  std::vector<Event> events;
  auto add = [&](Event e) { events.push_back(std::move(e)); };
  const auto g = world.universe(Projection::kPi1);
  const auto adj = world.universe(Projection::kPi3);
  for (auto label : {"a", "b"}) add({.kind = EventKind::kInsert, .node = g.fresh, .text = label});
  add({.kind = EventKind::kInsert, .node = g.fresh + 1, .other = 0, .attach = true, .text = "a"});
  for (auto n : g.nodes) add({.kind = EventKind::kDelete, .node = n});

  add({.kind = EventKind::kMerge, .items = {{0, "v1"}}});
  add({.kind = EventKind::kMerge, .items = {{0, "v2"}}});
  add({.kind = EventKind::kMerge, .items = {{1, "v1"}, {2, "v2"}}});
  add({.kind = EventKind::kCompact});

  add({.kind = EventKind::kTraverse, .node = 0, .hops = 1});
  add({.kind = EventKind::kTraverse, .node = 0, .hops = 2});
  add({.kind = EventKind::kTraverse, .node = 3, .hops = 2});
  add({.kind = EventKind::kUpdate, .node = 0, .update = UpdateKind::kSetLabel, .text = "b"});
  add({.kind = EventKind::kUpdate, .node = 1, .update = UpdateKind::kSetLabel, .text = "a"});
  for (NodeId src : {NodeId{0}, NodeId{4}}) {
    const NodeId dst = src == 0 ? 4 : 0;
    const bool exists = std::find(adj.edges.begin(), adj.edges.end(), std::pair(src, dst)) != adj.edges.end();
    add({.kind = EventKind::kUpdate,
         .node = src,
         .other = dst,
         .update = exists ? UpdateKind::kRemoveEdge : UpdateKind::kAddEdge});
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(2, adj.edges.size()); ++i) {
    add({.kind = EventKind::kUpdate,
         .node = adj.edges[i].first,
         .other = adj.edges[i].second,
         .update = UpdateKind::kRemoveEdge});
  }

  add({.kind = EventKind::kPut, .text = "blob-0"});
  add({.kind = EventKind::kPut, .text = "fresh-x"});
  add({.kind = EventKind::kPut, .text = "fresh-y"});
  add({.kind = EventKind::kGet, .target = 0});
  add({.kind = EventKind::kGet, .target = 1});

  const auto caps = world.universe(Projection::kPi5).caps;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, caps.size()); ++i) {
    add({.kind = EventKind::kGrant, .text = "x" + std::to_string(i), .target = caps[i].id,
         .rights = capability::Rights::kRead, .ttl = 100});
  }
  for (std::size_t i = 1; i < caps.size(); ++i) add({.kind = EventKind::kRevoke, .target = caps[i].id});

  add({.kind = EventKind::kAcquireLease, .target = 0, .client = 1, .write = true});
  add({.kind = EventKind::kAcquireLease, .target = 0, .client = 1, .write = false});
  add({.kind = EventKind::kAcquireLease, .target = 1, .client = 1, .write = true});
  add({.kind = EventKind::kReleaseLease, .client = 0});
  add({.kind = EventKind::kReleaseLease, .client = 1});
  return events;
}

Classification classify(const Event& e1, const Event& e2, const World& state) {
  try {
    return check_pair(e1, e2, state).verdict == PairVerdict::kCommute ? Classification::kCommute
                                                                       : Classification::kDiverge;
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kIllegalFromState) return Classification::kIllegal;
    throw;
  }
}

Classification oracle_classify(const Event& e1, const Event& e2, const World& state) {
  auto a = state.clone();
  auto b = state.clone();
  const std::array<Event, 2> forward = {e1, e2};
  const std::array<Event, 2> backward = {e2, e1};
  const auto oa = a->run(forward);
  const auto ob = b->run(backward);
  auto failed = [](const std::vector<Outcome>& o) { return !o[0].ok() || !o[1].ok(); };
  if (failed(oa) && failed(ob)) return Classification::kIllegal;
  if (failed(oa) != failed(ob)) return Classification::kDiverge;
  std::string ra = to_string(oa[0]) + '\n' + to_string(oa[1]);
  std::string rb = to_string(ob[1]) + '\n' + to_string(ob[0]);
  if (e1 == e2) {
    std::array<std::string, 2> x = {to_string(oa[0]), to_string(oa[1])};
    std::array<std::string, 2> y = {to_string(ob[0]), to_string(ob[1])};
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    ra = x[0] + '\n' + x[1];
    rb = y[0] + '\n' + y[1];
  }
  ra += '\n' + a->serialize_full();
  rb += '\n' + b->serialize_full();
  return ra == rb ? Classification::kCommute : Classification::kDiverge;
}

OracleReport exhaustive_oracle(const Config& config, std::uint64_t seed) {
  OracleReport report;
  const auto world = small_world(config, seed);
  const auto events = small_event_set(*world);
  for (const auto& e1 : events) {
    for (const auto& e2 : events) {
      const auto got = classify(e1, e2, *world);
      const auto want = oracle_classify(e1, e2, *world);
      ++report.pairs;
      if (want == Classification::kIllegal) ++report.illegal;
      if (want == Classification::kDiverge) ++report.diverging;
      if (got == want) {
        ++report.agreements;
      } else {
        report.disagreements.push_back(to_string(e1) + " / " + to_string(e2));
      }
    }
  }
  return report;
}

}  // namespace tetra::commute
