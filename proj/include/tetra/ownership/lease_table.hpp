#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tetra/cas/pack_store.hpp"

namespace tetra::ownership {

using LeaseId = std::uint64_t;

struct ReadLease {
  ObjectId object = 0;
  LeaseId id = 0;
  Tick issued = 0;
};

struct WriteLease {
  ObjectId object = 0;
  LeaseId id = 0;
  Tick issued = 0;
};

// One committed version. Immutable once published through the head pointer.
struct HeadRecord {
  cas::ContentHash content;
  // Digest of the (parent record, content, tick, version) record stored in the CAS.
  cas::ContentHash record;
  std::uint64_t version = 0;
  Tick tick = 0;
};

struct EntryState {
  std::uint32_t readers = 0;
  bool writer = false;
  cas::ContentHash head;
  cas::ContentHash head_record;
  std::uint64_t version = 0;

  bool operator==(const EntryState&) const = default;
};

struct ReplayReport {
  std::uint64_t versions = 0;
  cas::ContentHash reconstructed_head;
  // Mismatching fields between the replayed chain and the live head. Zero when clean.
  std::uint64_t diff = 0;
};

// Serialized version record: "VREC" | parent record | content | u64 tick | u64 version.
Bytes encode_version_record(const cas::ContentHash& parent_record, const cas::ContentHash& content, Tick tick,
                            std::uint64_t version);

// Per-object exclusive-write / shared-read leases. The reader count and writer
// flag share one atomic word, so (writer, readers) is always in
// {(0, n), (1, 0)}. Commit publishes a new head with a single pointer store.
class LeaseTable {
 public:
  LeaseTable() = default;
  LeaseTable(const LeaseTable&) = delete;
  LeaseTable& operator=(const LeaseTable&) = delete;

  // Registers a fresh object and hands back its implicit root write lease.
  WriteLease create(ObjectId object, Tick tick = 0);
  bool exists(ObjectId object) const;
  std::vector<ObjectId> objects() const;

  ReadLease acquire_read(ObjectId object, Tick tick = 0);
  WriteLease acquire_write(ObjectId object, Tick tick = 0);
  cas::ContentHash commit(const WriteLease& lease, ByteView content, cas::PackStore& store, Tick tick = 0);
  void release(const ReadLease& lease);
  void release(const WriteLease& lease);

  bool is_live(const WriteLease& lease) const;
  EntryState state(ObjectId object) const;
  // Writes to the entry performed by the most recent commit on it.
  std::uint64_t last_commit_entry_ops(ObjectId object) const;

  // Walks the version chain in the CAS back to the first version and replays it forward.
  ReplayReport replay(ObjectId object, const cas::PackStore& store) const;

  // Copy of all entries and committed history. Outstanding leases carry over.
  std::unique_ptr<LeaseTable> clone() const;

 private:
  static constexpr std::uint64_t kWriterBit = 1ull << 63;

  struct Entry {
    std::atomic<std::uint64_t> word{0};
    std::atomic<const HeadRecord*> head{nullptr};
    std::atomic<LeaseId> write_lease{0};
    std::atomic<std::uint64_t> commit_ops{0};
    std::deque<HeadRecord> history;  // append-only; element addresses are stable
    std::mutex readers_mutex;
    std::unordered_set<LeaseId> live_readers;
  };

  Entry& entry(ObjectId object) const;

  mutable std::shared_mutex map_mutex_;
  std::unordered_map<ObjectId, std::unique_ptr<Entry>> entries_;
  std::atomic<LeaseId> next_lease_{1};
};

}  // namespace tetra::ownership
