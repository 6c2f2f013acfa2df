#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "tetra/cas/content_hash.hpp"
#include "tetra/cas/pack.hpp"

namespace tetra::cas {

struct StoreOptions {
  // Pack segments are mirrored to `segment-NNNNNN.pack` files here when set.
  std::optional<std::filesystem::path> directory;
  std::uint64_t max_object_size = 64ull << 20;
  bool verify_on_get = true;
  // Off only for ablation runs: every put appends, even for known content.
  bool deduplicate = true;
  // A new segment starts once the current one reaches this size.
  std::uint64_t segment_bytes = 4ull << 20;
};

struct WriteStats {
  std::uint64_t logical_bytes = 0;
  std::uint64_t physical_bytes = 0;
};

// physical / logical. Throws kNoWritesYet when nothing was submitted.
double write_amplification(const WriteStats& stats);

// `logical_bytes,physical_bytes,wa` with one data row.
std::string stats_csv(const WriteStats& stats);

struct Location {
  std::uint32_t segment = 0;
  std::uint64_t offset = 0;  // payload offset within the segment
  std::uint64_t length = 0;
};

// Append-only content-addressed store over a sequence of pack segments.
// Many concurrent readers, puts serialized internally.
class PackStore {
 public:
  explicit PackStore(StoreOptions options = {});
  ~PackStore();
  PackStore(const PackStore&) = delete;
  PackStore& operator=(const PackStore&) = delete;

  ContentHash put(ByteView content);
  // Maintenance write (compaction output): stored like put, but not counted as
  // logical bytes since no caller submitted it.
  ContentHash put_maintenance(ByteView content);
  Bytes get(const ContentHash& hash) const;
  bool contains(const ContentHash& hash) const;
  std::optional<Location> locate(const ContentHash& hash) const;

  WriteStats stats() const;
  std::size_t object_count() const;
  std::size_t segment_count() const;
  Bytes segment_bytes(std::size_t segment) const;
  // Live bytes referenced by the index (payload only), for space amplification.
  std::uint64_t live_payload_bytes() const;

  // Ends the current segment; the next put opens a fresh one.
  void seal_segment();

  // Copies the given entries into `target_segments` fresh segments and points
  // the index at the copies. Returns the physical bytes written.
  std::uint64_t relocate(std::span<const ContentHash> hashes, std::size_t target_segments);

  void close();
  bool is_open() const;
  const StoreOptions& options() const { return options_; }

  // Independent in-memory copy of the current contents and counters.
  std::unique_ptr<PackStore> clone() const;

 private:
  void load_directory();
  std::uint32_t open_segment_locked();
  void append_entry_locked(std::uint32_t segment, const ContentHash& hash, ByteView content);
  std::filesystem::path segment_path(std::size_t segment) const;
  void require_open() const;
  ContentHash put_impl(ByteView content, bool logical);

  StoreOptions options_;
  mutable std::shared_mutex mutex_;
  bool open_ = true;
  // Sealed segments never change, so clones share them; only the open one is copied.
  std::vector<std::shared_ptr<Bytes>> segments_;
  std::optional<std::uint32_t> current_;
  std::unique_ptr<std::ofstream> current_file_;
  std::unordered_map<ContentHash, Location> index_;
  WriteStats stats_;
};

}  // namespace tetra::cas
