#include "tetra/graph/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

namespace tetra::graph {

const Node& Graph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  return it->second;
}

void Graph::bump_degree(std::size_t from, std::size_t to) {
  if (from != SIZE_MAX) {
    auto it = degree_counts_.find(from);
    if (--it->second == 0) degree_counts_.erase(it);
  }
  if (to != SIZE_MAX) ++degree_counts_[to];
}

void Graph::add_node(NodeId id, Label label) {
  auto [it, inserted] = nodes_.try_emplace(id);
  if (!inserted) throw Error(ErrorCode::kInvalidParams, "node exists: " + std::to_string(id));
  it->second.label = std::move(label);
  bump_degree(SIZE_MAX, 0);
}

NodeId Graph::add_node(Label label) {
  const auto id = next_id();
  add_node(id, std::move(label));
  return id;
}

void Graph::remove_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  for (const auto& [dst, type] : it->second.out) {
    if (dst != id) nodes_.at(dst).in.erase({id, type});
    --edge_count_;
  }
  for (const auto& [src, type] : it->second.in) {
    if (src != id) {
      auto& source = nodes_.at(src);
      const auto before = source.out.size();
      source.out.erase({id, type});
      bump_degree(before, source.out.size());
      --edge_count_;
    }
  }
  bump_degree(it->second.out.size(), SIZE_MAX);
  nodes_.erase(it);
}

void Graph::set_label(NodeId id, Label label) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  it->second.label = std::move(label);
}

void Graph::set_value(NodeId id, std::optional<cas::ContentHash> value) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  it->second.value = value;
}

Edge Graph::add_edge(NodeId src, NodeId dst, EdgeType type) {
  auto s = nodes_.find(src);
  if (s == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(src));
  auto d = nodes_.find(dst);
  if (d == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(dst));
  if (s->second.out.emplace(dst, type).second) {
    bump_degree(s->second.out.size() - 1, s->second.out.size());
    d->second.in.emplace(src, type);
    ++edge_count_;
  }
  return Edge{src, dst, std::move(type)};
}

void Graph::remove_edge(const Edge& edge) {
  auto s = nodes_.find(edge.src);
  if (s == nodes_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(edge.src));
  if (s->second.out.erase({edge.dst, edge.type}) == 0) {
    throw Error(ErrorCode::kNotFound, "edge " + std::to_string(edge.src) + "->" + std::to_string(edge.dst));
  }
  bump_degree(s->second.out.size() + 1, s->second.out.size());
  nodes_.at(edge.dst).in.erase({edge.src, edge.type});
  --edge_count_;
}

bool Graph::has_edge(const Edge& edge) const {
  auto s = nodes_.find(edge.src);
  return s != nodes_.end() && s->second.out.contains({edge.dst, edge.type});
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (const auto& [src, node] : nodes_) {
    for (const auto& [dst, type] : node.out) out.push_back(Edge{src, dst, type});
  }
  return out;
}

std::size_t Graph::max_out_degree() const {
  return degree_counts_.empty() ? 0 : degree_counts_.rbegin()->first;
}

void Graph::neighbors(NodeId id, std::vector<NodeId>& out) const {
  const auto& n = node(id);
  NodeId last = 0;
  bool first = true;
  for (const auto& [dst, _] : n.out) {
    if (first || dst != last) out.push_back(dst);
    last = dst;
    first = false;
  }
}

Graph Graph::restrict(const capability::Region& region) const {
  Graph out;
  for (const auto& [id, node] : nodes_) {
    if (!region.contains(id)) continue;
    out.add_node(id, node.label);
    out.nodes_.at(id).value = node.value;
  }
  for (const auto& [id, node] : nodes_) {
    if (!region.contains(id)) continue;
    for (const auto& [dst, type] : node.out) {
      if (region.contains(dst)) out.add_edge(id, dst, type);
    }
  }
  return out;
}

cas::ContentHash Graph::state_hash() const {
  cas::Hasher hasher;
  Bytes buf;
  for (const auto& [id, node] : nodes_) {
    buf.clear();
    put_u64(buf, id);
    put_string(buf, node.label);
    put_u8(buf, node.value ? 1 : 0);
    if (node.value) put_bytes(buf, node.value->digest);
    put_u64(buf, node.out.size());
    for (const auto& [dst, type] : node.out) {
      put_u64(buf, dst);
      put_string(buf, type);
    }
    hasher.update(buf);
  }
  return hasher.finish();
}

bool LabelSchema::conforms(const Graph& graph) const { return !first_violation(graph).has_value(); }

std::optional<Edge> LabelSchema::first_violation(const Graph& graph) const {
  for (const auto& [src, node] : graph.nodes()) {
    for (const auto& [dst, type] : node.out) {
      if (!allows(node.label, type, graph.node(dst).label)) return Edge{src, dst, type};
    }
  }
  return std::nullopt;
}

void write_edge_list(const Graph& graph, std::ostream& edges, std::ostream& labels) {
  for (const auto& [id, node] : graph.nodes()) labels << id << ' ' << node.label << '\n';
  for (const auto& e : graph.edges()) edges << e.src << ' ' << e.dst << ' ' << e.type << '\n';
}

Graph read_edge_list(std::istream& edges, std::istream& labels) {
  Graph graph;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(labels, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream in(line);
    NodeId id;
    Label label;
    if (!(in >> id >> label)) throw Error(ErrorCode::kParseError, "labels line " + std::to_string(lineno), lineno);
    graph.add_node(id, label);
  }
  lineno = 0;
  while (std::getline(edges, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream in(line);
    NodeId src, dst;
    EdgeType type;
    if (!(in >> src >> dst >> type)) throw Error(ErrorCode::kParseError, "edges line " + std::to_string(lineno), lineno);
    graph.add_edge(src, dst, type);
  }
  return graph;
}

}  // namespace tetra::graph
