#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "tetra/core/record.hpp"

namespace tetra::core {

// One point read on the engine's read path.
struct AccessRecord {
  bool hit = false;
  // Chunks chased to rebuild the record (the fragment chain length).
  std::uint32_t depth = 1;
  // Storage touches: the cache probe, plus one CAS read per chunk on a miss.
  std::uint32_t steps = 1;
  double latency_ms = 0.0;
};

// LRU tier of assembled node records keyed by logical content hash.
class ReadCache {
 public:
  explicit ReadCache(std::size_t capacity) : capacity_(capacity) {}

  std::shared_ptr<const NodeRecord> find(const cas::ContentHash& key);
  void insert(const cas::ContentHash& key, std::shared_ptr<const NodeRecord> record);
  void clear();

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  using Item = std::pair<cas::ContentHash, std::shared_ptr<const NodeRecord>>;

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Item> order_;  // most recent first
  std::unordered_map<cas::ContentHash, std::list<Item>::iterator> index_;
};

}  // namespace tetra::core
