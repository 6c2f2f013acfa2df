#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tetra/cas/pack_store.hpp"
#include "tetra/core/read_cache.hpp"
#include "tetra/core/snapshot.hpp"
#include "tetra/graph/editor.hpp"
#include "tetra/graph/observation.hpp"

namespace tetra::core {

struct LineageOptions {
  // Fragment bound k: longest chunk chain a node record may have.
  std::size_t max_chain = 2;
  graph::Partition partition;
  // Entries in the LRU read tier; 0 turns the tier off.
  std::size_t cache_capacity = 0;
};

struct LineageVerdict {
  bool accepted = true;
  // Offending link counted from the head (0 = head itself).
  std::size_t link = 0;
  std::optional<cas::ContentHash> at;
  std::string reason;
  // Invariant entries where the forward replay disagrees with the head.
  std::uint64_t replay_diff = 0;
  std::size_t length = 0;

  explicit operator bool() const { return accepted; }
};

// Fetches serialized snapshot bytes by claimed hash.
using SnapshotLoader = std::function<Bytes(const cas::ContentHash&)>;

// Walks parent links from `head`, checking each link's bytes against its
// hash and that ticks strictly increase, then replays the chain forward and
// rebuilds every changed record from `store` to compare with the head.
LineageVerdict lineage_check(const cas::ContentHash& head, const SnapshotLoader& load, const cas::PackStore& store);

struct LineageRow {
  Tick tick = 0;
  cas::ContentHash hash;
  std::optional<cas::ContentHash> parent;
  std::uint32_t fragment_count = 0;
};

// `s` cut down to the nodes in `region`: edges leaving the region are
// dropped and the rewritten records are stored in `store`.
Snapshot restrict(const Snapshot& s, const capability::Region& region, cas::PackStore& store);

// Nodes and edges of `g` as one observation over the empty graph.
graph::Observation observation_from(const graph::Graph& g);

// A single-writer chain of snapshots over one pack store. Starts from an
// empty genesis snapshot at tick 0.
class Lineage {
 public:
  explicit Lineage(cas::PackStore& store, LineageOptions options = {});

  std::shared_ptr<const Snapshot> head() const;
  // The head's graph. Valid until the next commit or compaction.
  const graph::Graph& head_view() const { return head_view_; }

  // Applies `obs` to the head and appends the result. On any error the head is unchanged.
  std::shared_ptr<const Snapshot> commit(const graph::Observation& obs, Tick tick);

  graph::Graph view(const Snapshot& s) const;

  // Point read through the LRU tier.
  std::shared_ptr<const NodeRecord> read_node(const Snapshot& s, NodeId id, AccessRecord* access = nullptr);

  // Consolidates every record to one chunk and moves the root's chunks into
  // at most k fresh segments. Same tick and parent as `s`; replaces the head
  // when `s` is the head. Returns `s` itself when already compact.
  std::shared_ptr<const Snapshot> compact(const Snapshot& s, std::size_t k);
  // Physical bytes written by the last compact call.
  std::uint64_t last_compaction_bytes() const { return last_compaction_bytes_; }

  LineageVerdict check(const Snapshot& head) const;
  LineageVerdict check() const { return check(*head()); }

  std::uint32_t fragment_count(const Root& root) const;

  const std::vector<LineageRow>& rows() const { return rows_; }
  // `tick,snapshot_hash,parent_hash,fragment_count`
  std::string lineage_csv() const;

  cas::PackStore& store() { return store_; }
  const cas::PackStore& store() const { return store_; }
  const LineageOptions& options() const { return options_; }
  ReadCache& cache() { return cache_; }

  // Same chain over another store holding the same contents (see PackStore::clone).
  std::unique_ptr<Lineage> clone(cas::PackStore& store) const;

 private:
  Lineage(cas::PackStore& store, LineageOptions options, std::shared_ptr<const Snapshot> head, graph::Graph view,
          std::vector<LineageRow> rows);
  std::shared_ptr<const Snapshot> publish_root(Root root, std::optional<cas::ContentHash> parent, Tick tick,
                                               bool logical);

  cas::PackStore& store_;
  LineageOptions options_;
  mutable std::mutex writer_;
  std::shared_ptr<const Snapshot> head_;
  graph::Graph head_view_;
  std::vector<LineageRow> rows_;
  ReadCache cache_;
  std::uint64_t last_compaction_bytes_ = 0;
};

}  // namespace tetra::core
