#include "tetra/core/engine.hpp"

namespace tetra::core {

Bytes encode_object_head(ObjectId object, const cas::ContentHash& snapshot) {
  Bytes out = to_bytes("OBJH");
  put_u64(out, object);
  put_bytes(out, snapshot.digest);
  return out;
}

Engine::Engine(EngineOptions options)
    : options_(std::move(options)),
      store_(std::make_unique<cas::PackStore>(options_.store)),
      capabilities_(std::make_unique<capability::CapabilityTable>()),
      leases_(std::make_unique<ownership::LeaseTable>()),
      lineage_(std::make_unique<Lineage>(*store_, options_.lineage)) {}

graph::AccessContext Engine::context(capability::CapId cap, Tick now) const {
  return graph::AccessContext{capabilities_.get(), cap, now, options_.traversal};
}

Engine::Session Engine::open(capability::CapId cap, std::vector<ObjectId> objects, Tick now) {
  std::vector<ownership::WriteLease> held;
  try {
    for (auto object : options_.ownership ? objects : std::vector<ObjectId>{}) {
      held.push_back(leases_->exists(object) ? leases_->acquire_write(object, now) : leases_->create(object, now));
    }
  } catch (...) {
    for (const auto& lease : held) leases_->release(lease);
    throw;
  }
  auto editor = std::make_unique<graph::Editor>(lineage_->head_view(), context(cap, now), *leases_, held,
                                                options_.lineage.partition,
                                                options_.schema ? &*options_.schema : nullptr, options_.ownership);
  return Session(*this, std::move(held), std::move(editor));
}

Engine::Session::Session(Engine& engine, std::vector<ownership::WriteLease> leases,
                         std::unique_ptr<graph::Editor> editor)
    : engine_(&engine), leases_(std::move(leases)), editor_(std::move(editor)) {}

Engine::Session::Session(Session&& other) noexcept
    : engine_(other.engine_), leases_(std::move(other.leases_)), editor_(std::move(other.editor_)) {
  other.leases_.clear();
}

Engine::Session::~Session() { release(); }

void Engine::Session::release() {
  for (const auto& lease : leases_) {
    if (engine_->leases_->is_live(lease)) engine_->leases_->release(lease);
  }
  leases_.clear();
}

std::shared_ptr<const Snapshot> Engine::Session::commit(Tick tick) {
  for (const auto& lease : leases_) {
    if (!engine_->leases_->is_live(lease)) throw Error(ErrorCode::kStaleLease, "session lease expired");
  }
  auto snapshot = engine_->lineage_->commit(editor_->observation(), tick);
  for (const auto& lease : leases_) {
    engine_->leases_->commit(lease, encode_object_head(lease.object, snapshot->hash), *engine_->store_, tick);
  }
  release();
  return snapshot;
}

std::unique_ptr<Engine> Engine::clone() const {
  std::unique_ptr<Engine> copy(new Engine(Empty{}));
  copy->options_ = options_;
  copy->options_.store.directory.reset();
  copy->store_ = store_->clone();
  copy->capabilities_ = std::make_unique<capability::CapabilityTable>(*capabilities_);
  copy->leases_ = leases_->clone();
  copy->lineage_ = lineage_->clone(*copy->store_);
  return copy;
}

}  // namespace tetra::core
