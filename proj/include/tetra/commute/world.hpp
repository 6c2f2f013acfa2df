#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tetra/commute/event.hpp"
#include "tetra/core/snapshot.hpp"

namespace tetra::commute {

// Which layers are in place. A disabled layer is replaced by its baseline adapter.
struct Config {
  bool ownership = true;    // canonical owner order (pi1) and leases (pi6)
  bool lineage = true;      // snapshot lineage (pi2)
  bool graph_split = true;  // snapshot views for traversal (pi3)
  bool cas = true;          // content addressing (pi4)
  bool capability = true;   // capability lattice (pi5)

  static Config full() { return {}; }
  // Reference backends with no composition: only content addressing and the
  // capability table, which the unlayered reference system already has.
  static Config baseline() { return {false, false, false, true, true}; }
  // `component` is one of ownership, capability, cas, graph-split, or none.
  static Config without(std::string_view component);

  std::string name() const;
  bool operator==(const Config&) const = default;
};

// Size of a randomly drawn starting state.
struct StateShape {
  std::size_t nodes = 24;
  std::size_t ba_m = 2;
  std::size_t objects = 3;
  std::size_t clients = 4;
  std::size_t contents = 4;
  std::size_t grants = 3;
  // Node ids per ownership object.
  std::uint64_t owner_width = 8;
};

// What event generators may refer to.
struct Universe {
  std::vector<NodeId> nodes;
  NodeId fresh = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::string> labels;
  std::size_t objects = 0;
  std::size_t clients = 0;
  std::map<std::uint64_t, std::pair<ObjectId, bool>> holds;  // client -> (object, write)
  std::size_t contents = 0;
  std::vector<capability::Capability> caps;  // live, root first
};

// Observable state, compared modulo snapshot equivalence.
struct Observed {
  std::shared_ptr<const core::Snapshot> snapshot;
  std::string aux;
};

bool equivalent(const Observed& a, const Observed& b);

// Common event interface of the engine and every reference backend. A call
// to run is one window: the events arrive in the given order.
class Adapter {
 public:
  virtual ~Adapter() = default;
  virtual std::unique_ptr<Adapter> clone() const = 0;
  virtual std::vector<Outcome> run(std::span<const Event> events, Tick tick) = 0;
  virtual void observe(Observed& out) const = 0;
  virtual void universe(Projection p, Universe& out) const = 0;
  // Plain rendering of all state for the brute-force oracle.
  virtual std::string serialize_full() const = 0;
};

// A complete system under test: one adapter per projection as chosen by Config.
class World {
 public:
  World(const Config& config, const StateShape& shape, std::uint64_t seed);

  std::unique_ptr<World> clone() const;
  std::vector<Outcome> run(std::span<const Event> events);
  Observed observe() const;
  Universe universe(Projection p) const;
  std::string serialize_full() const;

  Tick tick() const { return tick_; }
  const Config& config() const { return config_; }

 private:
  World() = default;

  Config config_;
  Tick tick_ = 0;
  std::vector<std::unique_ptr<Adapter>> adapters_;
  std::array<std::size_t, 6> route_{};
};

}  // namespace tetra::commute
