#include "tetra/core/read_cache.hpp"

namespace tetra::core {

std::shared_ptr<const NodeRecord> ReadCache::find(const cas::ContentHash& key) {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return nullptr;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void ReadCache::insert(const cas::ContentHash& key, std::shared_ptr<const NodeRecord> record) {
  if (capacity_ == 0) return;
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) {
    it->second->second = std::move(record);
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  order_.emplace_front(key, std::move(record));
  index_[key] = order_.begin();
  if (order_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
}

void ReadCache::clear() {
  std::lock_guard lock(mutex_);
  order_.clear();
  index_.clear();
}

std::size_t ReadCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

}  // namespace tetra::core
