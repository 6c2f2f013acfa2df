#include "tetra/cas/pack_store.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <unordered_set>

namespace tetra::cas {

double write_amplification(const WriteStats& stats) {
  if (stats.logical_bytes == 0) throw Error(ErrorCode::kNoWritesYet, "no logical bytes submitted");
  return static_cast<double>(stats.physical_bytes) / static_cast<double>(stats.logical_bytes);
}

std::string stats_csv(const WriteStats& stats) {
  char row[96];
  std::snprintf(row, sizeof(row), "%llu,%llu,%.6f\n", static_cast<unsigned long long>(stats.logical_bytes),
                static_cast<unsigned long long>(stats.physical_bytes),
                stats.logical_bytes ? write_amplification(stats) : 0.0);
  return std::string("logical_bytes,physical_bytes,wa\n") + row;
}

namespace {

Bytes pack_header(std::uint8_t algorithm) {
  Bytes out;
  for (char c : kPackMagic) put_u8(out, static_cast<std::uint8_t>(c));
  put_u32(out, kPackFormatVersion);
  put_u8(out, algorithm);
  return out;
}

}  // namespace

PackStore::PackStore(StoreOptions options) : options_(std::move(options)) {
  if (options_.directory) {
    std::filesystem::create_directories(*options_.directory);
    load_directory();
  }
}

PackStore::~PackStore() = default;

std::filesystem::path PackStore::segment_path(std::size_t segment) const {
  char name[32];
  std::snprintf(name, sizeof(name), "segment-%06zu.pack", segment);
  return *options_.directory / name;
}

void PackStore::load_directory() {
  for (std::size_t segment = 0;; ++segment) {
    const auto path = segment_path(segment);
    if (!std::filesystem::exists(path)) break;
    std::ifstream in(path, std::ios::binary);
    Bytes bytes(std::filesystem::file_size(path));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw Error(ErrorCode::kIo, "short read on " + path.string());
    auto pack = Pack::parse(bytes, /*verify=*/true);
    for (const auto& entry : pack.entries()) {
      // Later segments win, so relocated copies shadow the originals.
      index_[entry.hash] = Location{static_cast<std::uint32_t>(segment), entry.offset, entry.length};
    }
    segments_.push_back(std::make_shared<Bytes>(std::move(bytes)));
  }
}

void PackStore::require_open() const {
  if (!open_) throw Error(ErrorCode::kStoreClosed, "pack store is closed");
}

std::uint32_t PackStore::open_segment_locked() {
  const auto id = static_cast<std::uint32_t>(segments_.size());
  segments_.push_back(std::make_shared<Bytes>(pack_header(kSha256AlgorithmId)));
  stats_.physical_bytes += kPackHeaderSize;
  if (options_.directory) {
    current_file_ = std::make_unique<std::ofstream>(segment_path(id), std::ios::binary | std::ios::trunc);
    current_file_->write(reinterpret_cast<const char*>(segments_.back()->data()), kPackHeaderSize);
    current_file_->flush();
  }
  current_ = id;
  return id;
}

void PackStore::append_entry_locked(std::uint32_t segment, const ContentHash& hash, ByteView content) {
  auto& bytes = *segments_[segment];
  const auto start = bytes.size();
  put_bytes(bytes, hash.digest);
  put_u64(bytes, content.size());
  put_bytes(bytes, content);
  const auto written = bytes.size() - start;
  stats_.physical_bytes += written;
  index_[hash] = Location{segment, start + kEntryHeaderSize, content.size()};
  if (options_.directory && current_ == segment && current_file_) {
    current_file_->write(reinterpret_cast<const char*>(bytes.data() + start), static_cast<std::streamsize>(written));
    current_file_->flush();
    if (!*current_file_) throw Error(ErrorCode::kIo, "pack append failed");
  }
}

ContentHash PackStore::put(ByteView content) { return put_impl(content, true); }

ContentHash PackStore::put_maintenance(ByteView content) { return put_impl(content, false); }

ContentHash PackStore::put_impl(ByteView content, bool logical) {
  std::unique_lock lock(mutex_);
  require_open();
  if (content.size() > options_.max_object_size) {
    throw Error(ErrorCode::kObjectTooLarge, "object exceeds limit", options_.max_object_size);
  }
  auto hash = sha256(content);
  if (logical) stats_.logical_bytes += content.size();
  if (options_.deduplicate && index_.contains(hash)) return hash;
  if (!current_ || segments_[*current_]->size() >= options_.segment_bytes) open_segment_locked();
  append_entry_locked(*current_, hash, content);
  return hash;
}

Bytes PackStore::get(const ContentHash& hash) const {
  std::shared_lock lock(mutex_);
  require_open();
  auto it = index_.find(hash);
  if (it == index_.end()) throw Error(ErrorCode::kNotFound, hash.hex());
  const auto& loc = it->second;
  const auto& segment = *segments_[loc.segment];
  Bytes out(segment.begin() + static_cast<std::ptrdiff_t>(loc.offset),
            segment.begin() + static_cast<std::ptrdiff_t>(loc.offset + loc.length));
  if (options_.verify_on_get) {
    auto actual = sha256(out);
    actual.algorithm = hash.algorithm;
    if (actual != hash) throw Error(ErrorCode::kCorruptEntry, hash.hex());
  }
  return out;
}

bool PackStore::contains(const ContentHash& hash) const {
  std::shared_lock lock(mutex_);
  return index_.contains(hash);
}

std::optional<Location> PackStore::locate(const ContentHash& hash) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(hash);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WriteStats PackStore::stats() const {
  std::shared_lock lock(mutex_);
  return stats_;
}

std::size_t PackStore::object_count() const {
  std::shared_lock lock(mutex_);
  return index_.size();
}

std::size_t PackStore::segment_count() const {
  std::shared_lock lock(mutex_);
  return segments_.size();
}

Bytes PackStore::segment_bytes(std::size_t segment) const {
  std::shared_lock lock(mutex_);
  return *segments_.at(segment);
}

std::uint64_t PackStore::live_payload_bytes() const {
  std::shared_lock lock(mutex_);
  std::uint64_t total = 0;
  for (const auto& [hash, loc] : index_) total += loc.length;
  return total;
}

void PackStore::seal_segment() {
  std::unique_lock lock(mutex_);
  current_.reset();
  current_file_.reset();
}

std::uint64_t PackStore::relocate(std::span<const ContentHash> hashes, std::size_t target_segments) {
  std::unique_lock lock(mutex_);
  require_open();
  if (target_segments == 0) throw Error(ErrorCode::kInvalidParams, "relocate needs at least one segment");
  std::vector<ContentHash> unique;
  std::unordered_set<ContentHash> seen;
  for (const auto& h : hashes) {
    if (!index_.contains(h)) throw Error(ErrorCode::kNotFound, h.hex());
    if (seen.insert(h).second) unique.push_back(h);
  }
  if (unique.empty()) return 0;

  const auto before = stats_.physical_bytes;
  const auto per_segment = (unique.size() + target_segments - 1) / target_segments;
  current_.reset();
  current_file_.reset();
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (i % per_segment == 0) open_segment_locked();
    const auto loc = index_.at(unique[i]);
    const auto& source = *segments_[loc.segment];
    Bytes content(source.begin() + static_cast<std::ptrdiff_t>(loc.offset),
                  source.begin() + static_cast<std::ptrdiff_t>(loc.offset + loc.length));
    append_entry_locked(*current_, unique[i], content);
  }
  // Fresh puts must not land in the compacted segments.
  current_.reset();
  current_file_.reset();
  return stats_.physical_bytes - before;
}

void PackStore::close() {
  std::unique_lock lock(mutex_);
  open_ = false;
  current_file_.reset();
}

bool PackStore::is_open() const {
  std::shared_lock lock(mutex_);
  return open_;
}

std::unique_ptr<PackStore> PackStore::clone() const {
  std::shared_lock lock(mutex_);
  auto options = options_;
  options.directory.reset();
  auto copy = std::make_unique<PackStore>(options);
  copy->open_ = open_;
  copy->segments_ = segments_;
  if (current_) copy->segments_[*current_] = std::make_shared<Bytes>(*segments_[*current_]);
  copy->current_ = current_;
  copy->index_ = index_;
  copy->stats_ = stats_;
  return copy;
}

}  // namespace tetra::cas
