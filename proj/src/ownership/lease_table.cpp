#include "tetra/ownership/lease_table.hpp"

#include <algorithm>
#include <cstring>

namespace tetra::ownership {

namespace {

constexpr std::array<char, 4> kRecordMagic = {'V', 'R', 'E', 'C'};
constexpr std::uint64_t kReaderMask = (1ull << 63) - 1;

struct DecodedRecord {
  cas::ContentHash parent;
  cas::ContentHash content;
  Tick tick = 0;
  std::uint64_t version = 0;
};

DecodedRecord decode_version_record(ByteView bytes) {
  Reader in(bytes);
  auto magic = in.take(4);
  if (std::memcmp(magic.data(), kRecordMagic.data(), 4) != 0) {
    throw Error(ErrorCode::kFormatMismatch, "not a version record");
  }
  DecodedRecord rec;
  auto parent = in.take(32);
  std::memcpy(rec.parent.digest.data(), parent.data(), 32);
  auto content = in.take(32);
  std::memcpy(rec.content.digest.data(), content.data(), 32);
  rec.tick = in.u64();
  rec.version = in.u64();
  return rec;
}

}  // namespace

Bytes encode_version_record(const cas::ContentHash& parent_record, const cas::ContentHash& content, Tick tick,
                            std::uint64_t version) {
  Bytes out;
  for (char c : kRecordMagic) put_u8(out, static_cast<std::uint8_t>(c));
  put_bytes(out, parent_record.digest);
  put_bytes(out, content.digest);
  put_u64(out, tick);
  put_u64(out, version);
  return out;
}

LeaseTable::Entry& LeaseTable::entry(ObjectId object) const {
  std::shared_lock lock(map_mutex_);
  auto it = entries_.find(object);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownObject, std::to_string(object));
  return *it->second;
}

WriteLease LeaseTable::create(ObjectId object, Tick tick) {
  std::unique_lock lock(map_mutex_);
  if (entries_.contains(object)) throw Error(ErrorCode::kInvalidParams, "object exists: " + std::to_string(object));
  auto e = std::make_unique<Entry>();
  const auto id = next_lease_.fetch_add(1);
  e->word.store(kWriterBit);
  e->write_lease.store(id);
  entries_.emplace(object, std::move(e));
  return WriteLease{object, id, tick};
}

bool LeaseTable::exists(ObjectId object) const {
  std::shared_lock lock(map_mutex_);
  return entries_.contains(object);
}

std::vector<ObjectId> LeaseTable::objects() const {
  std::shared_lock lock(map_mutex_);
  std::vector<ObjectId> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

ReadLease LeaseTable::acquire_read(ObjectId object, Tick tick) {
  auto& e = entry(object);
  auto word = e.word.load(std::memory_order_acquire);
  do {
    if (word & kWriterBit) throw Error(ErrorCode::kWriterActive, std::to_string(object));
  } while (!e.word.compare_exchange_weak(word, word + 1, std::memory_order_acq_rel, std::memory_order_acquire));
  const auto id = next_lease_.fetch_add(1);
  {
    std::lock_guard lock(e.readers_mutex);
    e.live_readers.insert(id);
  }
  return ReadLease{object, id, tick};
}

WriteLease LeaseTable::acquire_write(ObjectId object, Tick tick) {
  auto& e = entry(object);
  auto word = e.word.load(std::memory_order_acquire);
  do {
    if (word & kWriterBit) throw Error(ErrorCode::kWriterActive, std::to_string(object));
    if ((word & kReaderMask) != 0) {
      throw Error(ErrorCode::kReadersActive, std::to_string(object), word & kReaderMask);
    }
  } while (!e.word.compare_exchange_weak(word, kWriterBit, std::memory_order_acq_rel, std::memory_order_acquire));
  const auto id = next_lease_.fetch_add(1);
  e.write_lease.store(id, std::memory_order_release);
  return WriteLease{object, id, tick};
}

cas::ContentHash LeaseTable::commit(const WriteLease& lease, ByteView content, cas::PackStore& store, Tick tick) {
  auto& e = entry(lease.object);
  if (e.write_lease.load(std::memory_order_acquire) != lease.id) {
    throw Error(ErrorCode::kStaleLease, std::to_string(lease.id));
  }
  const HeadRecord* prev = e.head.load(std::memory_order_acquire);
  const auto content_hash = store.put(content);
  const cas::ContentHash parent_record = prev ? prev->record : cas::ContentHash{};
  const std::uint64_t version = prev ? prev->version + 1 : 1;
  const auto record_hash = store.put(encode_version_record(parent_record, content_hash, tick, version));
  e.history.push_back(HeadRecord{content_hash, record_hash, version, tick});
  // The only write to shared entry state: one pointer swap.
  e.head.store(&e.history.back(), std::memory_order_release);
  e.commit_ops.store(1, std::memory_order_relaxed);
  return content_hash;
}

void LeaseTable::release(const ReadLease& lease) {
  auto& e = entry(lease.object);
  {
    std::lock_guard lock(e.readers_mutex);
    if (e.live_readers.erase(lease.id) == 0) throw Error(ErrorCode::kDoubleRelease, std::to_string(lease.id));
  }
  e.word.fetch_sub(1, std::memory_order_acq_rel);
}

void LeaseTable::release(const WriteLease& lease) {
  auto& e = entry(lease.object);
  LeaseId expected = lease.id;
  if (!e.write_lease.compare_exchange_strong(expected, 0, std::memory_order_acq_rel)) {
    throw Error(ErrorCode::kDoubleRelease, std::to_string(lease.id));
  }
  e.word.store(0, std::memory_order_release);
}

bool LeaseTable::is_live(const WriteLease& lease) const {
  return entry(lease.object).write_lease.load(std::memory_order_acquire) == lease.id;
}

EntryState LeaseTable::state(ObjectId object) const {
  auto& e = entry(object);
  const auto word = e.word.load(std::memory_order_acquire);
  EntryState s;
  s.writer = (word & kWriterBit) != 0;
  s.readers = static_cast<std::uint32_t>(word & kReaderMask);
  if (const HeadRecord* head = e.head.load(std::memory_order_acquire)) {
    s.head = head->content;
    s.head_record = head->record;
    s.version = head->version;
  }
  return s;
}

std::uint64_t LeaseTable::last_commit_entry_ops(ObjectId object) const {
  return entry(object).commit_ops.load(std::memory_order_relaxed);
}

ReplayReport LeaseTable::replay(ObjectId object, const cas::PackStore& store) const {
  const auto live = state(object);
  ReplayReport report;
  if (live.version == 0) return report;

  std::vector<DecodedRecord> chain;
  auto cursor = live.head_record;
  while (!cursor.is_zero()) {
    chain.push_back(decode_version_record(store.get(cursor)));
    cursor = chain.back().parent;
  }
  std::reverse(chain.begin(), chain.end());

  cas::ContentHash head;
  std::uint64_t expected_version = 1;
  for (const auto& rec : chain) {
    if (rec.version != expected_version) ++report.diff;
    // Re-apply: the content must still resolve and hash to what the record names.
    auto bytes = store.get(rec.content);
    if (cas::sha256(bytes) != rec.content) ++report.diff;
    head = rec.content;
    ++expected_version;
  }
  report.versions = chain.size();
  report.reconstructed_head = head;
  if (report.versions != live.version) ++report.diff;
  if (head != live.head) ++report.diff;
  return report;
}

std::unique_ptr<LeaseTable> LeaseTable::clone() const {
  auto copy = std::make_unique<LeaseTable>();
  std::shared_lock lock(map_mutex_);
  for (const auto& [id, src] : entries_) {
    auto e = std::make_unique<Entry>();
    e->word.store(src->word.load());
    e->write_lease.store(src->write_lease.load());
    e->commit_ops.store(src->commit_ops.load());
    const HeadRecord* head = src->head.load();
    if (head) {
      e->history.push_back(*head);
      e->head.store(&e->history.back());
    }
    {
      std::lock_guard rl(src->readers_mutex);
      e->live_readers = src->live_readers;
    }
    copy->entries_.emplace(id, std::move(e));
  }
  copy->next_lease_.store(next_lease_.load());
  return copy;
}

}  // namespace tetra::ownership
