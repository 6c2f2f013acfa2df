#include "tetra/graph/observation.hpp"

#include <algorithm>

namespace tetra::graph {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int canonical_rank(const Mutation& m) {
  return std::visit(Overloaded{
                        [](const RemoveNode&) { return 0; },
                        [](const AddNode&) { return 1; },
                        [](const RemoveEdge&) { return 2; },
                        [](const AddEdge&) { return 3; },
                        [](const SetLabel&) { return 4; },
                        [](const SetValue&) { return 5; },
                    },
                    m);
}

}  // namespace

NodeId primary_node(const Mutation& m) {
  return std::visit(Overloaded{
                        [](const AddNode& op) { return op.id; },
                        [](const RemoveNode& op) { return op.id; },
                        [](const SetLabel& op) { return op.id; },
                        [](const SetValue& op) { return op.id; },
                        [](const AddEdge& op) { return op.edge.src; },
                        [](const RemoveEdge& op) { return op.edge.src; },
                    },
                    m);
}

void Observation::apply(Graph& graph) const {
  for (const auto& m : ops_) {
    std::visit(Overloaded{
                   [&](const AddNode& op) { graph.add_node(op.id, op.label); },
                   [&](const RemoveNode& op) { graph.remove_node(op.id); },
                   [&](const SetLabel& op) { graph.set_label(op.id, op.label); },
                   [&](const SetValue& op) { graph.set_value(op.id, op.value); },
                   [&](const AddEdge& op) {
                     if (graph.has_edge(op.edge)) {
                       throw Error(ErrorCode::kInvalidParams, "edge exists: " + std::to_string(op.edge.src) + "->" +
                                                                  std::to_string(op.edge.dst));
                     }
                     graph.add_edge(op.edge.src, op.edge.dst, op.edge.type);
                   },
                   [&](const RemoveEdge& op) { graph.remove_edge(op.edge); },
               },
               m);
  }
}

Observation Observation::then(const Observation& later) const {
  auto ops = ops_;
  ops.insert(ops.end(), later.ops_.begin(), later.ops_.end());
  return Observation(std::move(ops));
}

Observation Observation::canonical() const {
  auto ops = ops_;
  std::stable_sort(ops.begin(), ops.end(), [](const Mutation& a, const Mutation& b) {
    const auto ra = canonical_rank(a);
    const auto rb = canonical_rank(b);
    if (ra != rb) return ra < rb;
    const auto na = primary_node(a);
    const auto nb = primary_node(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  return Observation(std::move(ops));
}

std::set<NodeId> Observation::touched_nodes(const Graph& base) const {
  std::set<NodeId> out;
  for (const auto& m : ops_) {
    out.insert(primary_node(m));
    if (const auto* rm = std::get_if<RemoveNode>(&m)) {
      if (base.has_node(rm->id)) {
        for (const auto& [src, _] : base.node(rm->id).in) out.insert(src);
      }
    }
  }
  return out;
}

}  // namespace tetra::graph
