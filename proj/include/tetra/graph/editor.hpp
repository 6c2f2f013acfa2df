#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "tetra/graph/observation.hpp"
#include "tetra/graph/traversal.hpp"
#include "tetra/ownership/lease_table.hpp"

namespace tetra::graph {

// Maps node ids onto ownership objects and capability scopes by fixed-width id blocks.
struct Partition {
  static constexpr std::uint64_t kWhole = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t owner_width = kWhole;
  std::uint64_t scope_width = kWhole;

  ObjectId owner_of(NodeId id) const { return owner_width == kWhole ? 0 : id / owner_width; }
  std::uint64_t scope_of(NodeId id) const { return scope_width == kWhole ? 0 : id / scope_width; }
};

// Stages mutations against a base graph. Every mutation needs a live write
// lease on the owning object and a write capability covering the touched
// nodes; with a schema set, every edge it creates must conform.
// `require_leases` is off only for ownership ablation runs.
class Editor {
 public:
  Editor(const Graph& base, AccessContext ctx, const ownership::LeaseTable& leases,
         std::vector<ownership::WriteLease> held, Partition partition = {}, const LabelSchema* schema = nullptr,
         bool require_leases = true);

  NodeId add_node(Label label);
  void add_node(NodeId id, Label label);
  void remove_node(NodeId id);
  void set_label(NodeId id, Label label);
  void set_value(NodeId id, std::optional<cas::ContentHash> value);
  Edge add_edge(NodeId src, NodeId dst, EdgeType type);
  void remove_edge(const Edge& edge);

  const Observation& observation() const { return observation_; }
  const Graph& staged() const { return staged_; }

 private:
  // Leases for the owners of `owned`; write capability over `owned` and `covered`.
  void authorize(std::initializer_list<NodeId> owned, std::initializer_list<NodeId> covered = {}) const;
  void check_edge_schema(NodeId src, const EdgeType& type, NodeId dst) const;

  Graph staged_;
  AccessContext ctx_;
  const ownership::LeaseTable& leases_;
  std::map<ObjectId, ownership::WriteLease> held_;
  Partition partition_;
  const LabelSchema* schema_;
  bool require_leases_;
  Observation observation_;
};

}  // namespace tetra::graph
