#pragma once

#include <compare>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tetra/cas/content_hash.hpp"
#include "tetra/capability/region.hpp"

namespace tetra::graph {

using Label = std::string;
using EdgeType = std::string;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeType type;
  auto operator<=>(const Edge&) const = default;
};

struct Node {
  Label label;
  std::optional<cas::ContentHash> value;
  std::set<std::pair<NodeId, EdgeType>> out;
  std::set<std::pair<NodeId, EdgeType>> in;
  bool operator==(const Node&) const = default;
};

// An observable graph state (V, E, label).
class Graph {
 public:
  bool has_node(NodeId id) const { return nodes_.contains(id); }
  const Node& node(NodeId id) const;
  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  NodeId next_id() const { return nodes_.empty() ? 0 : nodes_.rbegin()->first + 1; }

  void add_node(NodeId id, Label label);
  NodeId add_node(Label label);
  // Drops the node and every edge touching it.
  void remove_node(NodeId id);
  void set_label(NodeId id, Label label);
  void set_value(NodeId id, std::optional<cas::ContentHash> value);
  Edge add_edge(NodeId src, NodeId dst, EdgeType type);
  void remove_edge(const Edge& edge);
  bool has_edge(const Edge& edge) const;

  std::vector<Edge> edges() const;
  std::size_t max_out_degree() const;
  // Appends out-neighbour ids (deduplicated across edge types) in ascending order.
  void neighbors(NodeId id, std::vector<NodeId>& out) const;

  // Induced subgraph on the nodes inside `region`.
  Graph restrict(const capability::Region& region) const;

  // Digest of the canonical (sorted) node and edge listing.
  cas::ContentHash state_hash() const;

  bool operator==(const Graph& other) const { return nodes_ == other.nodes_; }

 private:
  void bump_degree(std::size_t from, std::size_t to);

  std::map<NodeId, Node> nodes_;
  std::size_t edge_count_ = 0;
  // out-degree -> number of nodes with that degree
  std::map<std::size_t, std::size_t> degree_counts_;
};

// Allowed (src-label, edge-type, dst-label) triples.
class LabelSchema {
 public:
  using Triple = std::tuple<Label, EdgeType, Label>;

  LabelSchema() = default;
  explicit LabelSchema(std::set<Triple> allowed) : allowed_(std::move(allowed)) {}

  void allow(Label src, EdgeType type, Label dst) { allowed_.emplace(std::move(src), std::move(type), std::move(dst)); }
  bool allows(const Label& src, const EdgeType& type, const Label& dst) const {
    return allowed_.contains(Triple{src, type, dst});
  }
  // Per-edge membership over the whole graph.
  bool conforms(const Graph& graph) const;
  std::optional<Edge> first_violation(const Graph& graph) const;
  const std::set<Triple>& triples() const { return allowed_; }

 private:
  std::set<Triple> allowed_;
};

// Edge-list text: `src dst edge_type` per line; labels file: `node label` per line.
void write_edge_list(const Graph& graph, std::ostream& edges, std::ostream& labels);
Graph read_edge_list(std::istream& edges, std::istream& labels);

}  // namespace tetra::graph
