#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tetra/cas/content_hash.hpp"

namespace tetra::core {

struct RootEntry {
  // Logical content: digest of the node's full record.
  cas::ContentHash content;
  // Physical chunk chain: a full record, then deltas. Placement detail, not logical state.
  std::vector<cas::ContentHash> fragments;
  std::uint64_t scope = 0;   // capability scope id
  std::uint64_t region = 0;  // ownership region id

  bool operator==(const RootEntry&) const = default;
};

using Root = std::map<NodeId, RootEntry>;

// An immutable commit. `hash` covers root, parent and tick.
struct Snapshot {
  Root root;
  std::optional<cas::ContentHash> parent;
  Tick tick = 0;
  cas::ContentHash hash;
  // Pack segments the root's chunks occupy when the snapshot was produced.
  std::uint32_t fragment_count = 0;
};

// "SNAP" | u32 version | u64 tick | u8 has-parent [| digest] | u64 entries |
// per entry: u64 node | digest | u64 scope | u64 region | u32 n | n digests.
Bytes serialize(const Root& root, const std::optional<cas::ContentHash>& parent, Tick tick);
inline Bytes serialize(const Snapshot& s) { return serialize(s.root, s.parent, s.tick); }
// Throws kFormatMismatch. The result's hash is recomputed from `bytes`.
Snapshot deserialize(ByteView bytes);

Snapshot make_snapshot(Root root, std::optional<cas::ContentHash> parent, Tick tick);

// What observational equivalence compares. Nothing about placement.
struct InvariantVector {
  std::map<NodeId, cas::ContentHash> content;
  std::map<NodeId, std::uint64_t> scopes;
  std::map<NodeId, std::uint64_t> regions;

  bool operator==(const InvariantVector&) const = default;
};

InvariantVector invariants(const Snapshot& s);
bool obs_equiv(const Snapshot& a, const Snapshot& b);

}  // namespace tetra::core
