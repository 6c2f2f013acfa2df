#pragma once

#include <span>
#include <vector>

#include "tetra/graph/graph.hpp"

namespace tetra::core {

// What a node persists: its label, value and outgoing edges. Incoming edges
// are derived when a view is rebuilt.
struct NodeRecord {
  graph::Label label;
  std::optional<cas::ContentHash> value;
  std::set<std::pair<NodeId, graph::EdgeType>> out;

  bool operator==(const NodeRecord&) const = default;
};

NodeRecord record_of(const graph::Node& node);

// Full record: "NREC" | label | u8 has-value [| digest] | u32 edge count | (u64 dst, type)*.
// Its digest is the node's logical content hash.
Bytes encode_record(const NodeRecord& record);
NodeRecord decode_record(ByteView bytes);

// Delta chunk from `before` to `after`: "NDLT" | u32 op count | op*.
Bytes encode_delta(const NodeRecord& before, const NodeRecord& after);
void apply_delta(NodeRecord& record, ByteView delta);

// Rebuilds a record from its chunk chain: one full record, then deltas.
NodeRecord assemble(std::span<const Bytes> chunks);

}  // namespace tetra::core
