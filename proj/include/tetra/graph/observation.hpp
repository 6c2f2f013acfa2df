#pragma once

#include <set>
#include <variant>
#include <vector>

#include "tetra/graph/graph.hpp"

namespace tetra::graph {

struct AddNode {
  NodeId id;
  Label label;
  auto operator<=>(const AddNode&) const = default;
};
struct RemoveNode {
  NodeId id;
  auto operator<=>(const RemoveNode&) const = default;
};
struct SetLabel {
  NodeId id;
  Label label;
  auto operator<=>(const SetLabel&) const = default;
};
struct SetValue {
  NodeId id;
  std::optional<cas::ContentHash> value;
  auto operator<=>(const SetValue&) const = default;
};
struct AddEdge {
  Edge edge;
  auto operator<=>(const AddEdge&) const = default;
};
struct RemoveEdge {
  Edge edge;
  auto operator<=>(const RemoveEdge&) const = default;
};

using Mutation = std::variant<AddNode, RemoveNode, SetLabel, SetValue, AddEdge, RemoveEdge>;

// Node whose persisted record a mutation rewrites (edges live with their source).
NodeId primary_node(const Mutation& m);

// A staged batch of graph mutations. Nothing touches persisted state until the
// batch is committed; composing two observations concatenates them.
class Observation {
 public:
  Observation() = default;
  explicit Observation(std::vector<Mutation> ops) : ops_(std::move(ops)) {}

  void push(Mutation m) { ops_.push_back(std::move(m)); }
  const std::vector<Mutation>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }

  // Applies in order. Throws on the first illegal mutation; `graph` may be
  // partially modified in that case.
  void apply(Graph& graph) const;

  // `later` after this.
  Observation then(const Observation& later) const;

  // The owner's canonical order: by node, then node removals, node inserts,
  // edge removals, edge inserts, label and value writes. Ties break on payload.
  Observation canonical() const;

  // Nodes whose records change, including sources of edges dropped by a node removal.
  std::set<NodeId> touched_nodes(const Graph& base) const;

 private:
  std::vector<Mutation> ops_;
};

}  // namespace tetra::graph
