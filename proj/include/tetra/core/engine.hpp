#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "tetra/capability/capability_table.hpp"
#include "tetra/core/lineage.hpp"
#include "tetra/ownership/lease_table.hpp"

namespace tetra::core {

struct EngineOptions {
  cas::StoreOptions store;
  LineageOptions lineage;
  std::optional<graph::LabelSchema> schema;
  graph::TraversalOptions traversal;
  // Off only for ablation runs: sessions take no leases and publish no object heads.
  bool ownership = true;
};

// The four layers wired together: one pack store, one capability table, one
// lease table and one lineage over them.
class Engine {
 public:
  explicit Engine(EngineOptions options = {});

  // A write session: holds write leases on its objects, stages edits, and
  // commits them as one snapshot. Leases are released when it ends.
  class Session {
   public:
    Session(Session&&) noexcept;
    ~Session();

    graph::Editor& editor() { return *editor_; }
    // Commits the staged observation, then advances each held object's head.
    std::shared_ptr<const Snapshot> commit(Tick tick);

   private:
    friend class Engine;
    Session(Engine& engine, std::vector<ownership::WriteLease> leases, std::unique_ptr<graph::Editor> editor);
    void release();

    Engine* engine_;
    std::vector<ownership::WriteLease> leases_;
    std::unique_ptr<graph::Editor> editor_;
  };

  // Takes write leases on `objects` (registering unknown ones) for `cap`.
  Session open(capability::CapId cap, std::vector<ObjectId> objects, Tick now);

  graph::AccessContext context(capability::CapId cap, Tick now) const;

  cas::PackStore& store() { return *store_; }
  capability::CapabilityTable& capabilities() { return *capabilities_; }
  ownership::LeaseTable& leases() { return *leases_; }
  Lineage& lineage() { return *lineage_; }
  const EngineOptions& options() const { return options_; }

  // Fully independent copy (in-memory store).
  std::unique_ptr<Engine> clone() const;

 private:
  struct Empty {};
  explicit Engine(Empty) {}

  EngineOptions options_;
  std::unique_ptr<cas::PackStore> store_;
  std::unique_ptr<capability::CapabilityTable> capabilities_;
  std::unique_ptr<ownership::LeaseTable> leases_;
  std::unique_ptr<Lineage> lineage_;
};

// Object head content written by a session commit: "OBJH" | u64 object | snapshot digest.
Bytes encode_object_head(ObjectId object, const cas::ContentHash& snapshot);

}  // namespace tetra::core
