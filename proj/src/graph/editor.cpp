#include "tetra/graph/editor.hpp"

namespace tetra::graph {

Editor::Editor(const Graph& base, AccessContext ctx, const ownership::LeaseTable& leases,
               std::vector<ownership::WriteLease> held, Partition partition, const LabelSchema* schema,
               bool require_leases)
    : staged_(base),
      ctx_(ctx),
      leases_(leases),
      partition_(partition),
      schema_(schema),
      require_leases_(require_leases) {
  for (const auto& lease : held) held_[lease.object] = lease;
}

void Editor::authorize(std::initializer_list<NodeId> owned, std::initializer_list<NodeId> covered) const {
  for (auto id : owned) {
    if (!require_leases_) break;
    auto it = held_.find(partition_.owner_of(id));
    if (it == held_.end() || !leases_.is_live(it->second)) {
      throw Error(ErrorCode::kStaleLease, "no live write lease for owner of node " + std::to_string(id));
    }
  }
  if (!ctx_.options.enforce_capability) return;
  std::vector<capability::Region::Interval> cover;
  for (auto id : owned) cover.push_back({id, id + 1});
  for (auto id : covered) cover.push_back({id, id + 1});
  auto verdict = ctx_.capabilities->verify(ctx_.cap, capability::Region::from_intervals(std::move(cover)),
                                           capability::Rights::kWrite, ctx_.now);
  if (!verdict) throw Error(ErrorCode::kCapabilityRejected, std::string(to_string(verdict.reason)));
}

void Editor::check_edge_schema(NodeId src, const EdgeType& type, NodeId dst) const {
  if (!schema_) return;
  const auto& sl = staged_.node(src).label;
  const auto& dl = staged_.node(dst).label;
  if (!schema_->allows(sl, type, dl)) throw Error(ErrorCode::kSchemaViolation, "(" + sl + ", " + type + ", " + dl + ")");
}

NodeId Editor::add_node(Label label) {
  const auto id = staged_.next_id();
  add_node(id, std::move(label));
  return id;
}

void Editor::add_node(NodeId id, Label label) {
  authorize({id});
  staged_.add_node(id, label);
  observation_.push(AddNode{id, std::move(label)});
}

void Editor::remove_node(NodeId id) {
  authorize({id});
  if (!staged_.has_node(id)) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  // Dropping in-edges rewrites the sources' records too.
  for (const auto& [src, _] : staged_.node(id).in) authorize({src});
  staged_.remove_node(id);
  observation_.push(RemoveNode{id});
}

void Editor::set_label(NodeId id, Label label) {
  authorize({id});
  if (!staged_.has_node(id)) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  if (schema_) {
    const auto& node = staged_.node(id);
    for (const auto& [dst, type] : node.out) {
      const auto& dl = dst == id ? label : staged_.node(dst).label;
      if (!schema_->allows(label, type, dl)) throw Error(ErrorCode::kSchemaViolation, "(" + label + ", " + type + ", " + dl + ")");
    }
    for (const auto& [src, type] : node.in) {
      const auto& sl = src == id ? label : staged_.node(src).label;
      if (!schema_->allows(sl, type, label)) throw Error(ErrorCode::kSchemaViolation, "(" + sl + ", " + type + ", " + label + ")");
    }
  }
  staged_.set_label(id, label);
  observation_.push(SetLabel{id, std::move(label)});
}

void Editor::set_value(NodeId id, std::optional<cas::ContentHash> value) {
  authorize({id});
  staged_.set_value(id, value);
  observation_.push(SetValue{id, value});
}

Edge Editor::add_edge(NodeId src, NodeId dst, EdgeType type) {
  if (!staged_.has_node(src)) throw Error(ErrorCode::kUnknownNode, std::to_string(src));
  if (!staged_.has_node(dst)) throw Error(ErrorCode::kUnknownNode, std::to_string(dst));
  authorize({src}, {dst});
  check_edge_schema(src, type, dst);
  Edge edge{src, dst, type};
  if (staged_.has_edge(edge)) return edge;
  staged_.add_edge(src, dst, type);
  observation_.push(AddEdge{edge});
  return edge;
}

void Editor::remove_edge(const Edge& edge) {
  authorize({edge.src}, {edge.dst});
  staged_.remove_edge(edge);
  observation_.push(RemoveEdge{edge});
}

}  // namespace tetra::graph
