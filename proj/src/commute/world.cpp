#include "tetra/commute/world.hpp"

#include "adapters.hpp"

namespace tetra::commute {

Config Config::without(std::string_view component) {
  Config c;
  if (component == "ownership") {
    c.ownership = false;
  } else if (component == "capability") {
    c.capability = false;
  } else if (component == "cas") {
    c.cas = false;
  } else if (component == "graph-split") {
    c.graph_split = false;
  } else if (component != "none" && !component.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "unknown component: " + std::string(component));
  }
  return c;
}

std::string Config::name() const {
  if (*this == full()) return "full";
  if (*this == baseline()) return "baseline";
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(ownership, "ownership");
  add(lineage, "lineage");
  add(graph_split, "graph-split");
  add(cas, "cas");
  add(capability, "capability");
  return "no-" + out;
}

bool equivalent(const Observed& a, const Observed& b) {
  if (static_cast<bool>(a.snapshot) != static_cast<bool>(b.snapshot)) return false;
  if (a.snapshot && !core::obs_equiv(*a.snapshot, *b.snapshot)) return false;
  return a.aux == b.aux;
}

World::World(const Config& config, const StateShape& shape, std::uint64_t seed) : config_(config), tick_(1) {
  const auto init = draw_initial_state(shape, seed);
  std::optional<std::size_t> engine, shared;
  auto engine_slot = [&] {
    if (!engine) {
      engine = adapters_.size();
      adapters_.push_back(make_engine_adapter(init));
    }
    return *engine;
  };
  auto shared_slot = [&] {
    if (!shared) {
      shared = adapters_.size();
      adapters_.push_back(make_shared_graph(init));
    }
    return *shared;
  };
  auto own = [&](std::unique_ptr<Adapter> a) {
    adapters_.push_back(std::move(a));
    return adapters_.size() - 1;
  };
  route_[index_of(Projection::kPi1)] = config.ownership ? engine_slot() : own(make_page_store(init));
  route_[index_of(Projection::kPi2)] = config.lineage ? engine_slot() : own(make_merge_log(init));
  route_[index_of(Projection::kPi3)] = config.graph_split ? engine_slot() : shared_slot();
  route_[index_of(Projection::kPi4)] = config.cas ? own(make_content_store(init)) : own(make_location_store(init));
  route_[index_of(Projection::kPi5)] =
      config.capability ? own(make_capability_adapter(init)) : own(make_flat_acl(init));
  route_[index_of(Projection::kPi6)] = config.ownership ? engine_slot() : shared_slot();
}

std::unique_ptr<World> World::clone() const {
  std::unique_ptr<World> copy(new World());
  copy->config_ = config_;
  copy->tick_ = tick_;
  copy->route_ = route_;
  for (const auto& a : adapters_) copy->adapters_.push_back(a->clone());
  return copy;
}

std::vector<Outcome> World::run(std::span<const Event> events) {
  ++tick_;
  std::vector<Outcome> out(events.size());
  for (std::size_t a = 0; a < adapters_.size(); ++a) {
    std::vector<Event> mine;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (route_[index_of(events[i].projection())] == a) {
        mine.push_back(events[i]);
        where.push_back(i);
      }
    }
    if (mine.empty()) continue;
    auto results = adapters_[a]->run(mine, tick_);
    for (std::size_t j = 0; j < where.size(); ++j) out[where[j]] = std::move(results[j]);
  }
  return out;
}

Observed World::observe() const {
  Observed out;
  for (const auto& a : adapters_) {
    Observed part;
    a->observe(part);
    if (part.snapshot) out.snapshot = part.snapshot;
    out.aux += part.aux;
    out.aux += '\n';
  }
  return out;
}

Universe World::universe(Projection p) const {
  Universe u;
  adapters_[route_[index_of(p)]]->universe(p, u);
  return u;
}

std::string World::serialize_full() const {
  std::string out;
  for (const auto& a : adapters_) {
    out += a->serialize_full();
    out += "--\n";
  }
  return out;
}

}  // namespace tetra::commute
