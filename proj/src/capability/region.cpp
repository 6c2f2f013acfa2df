#include "tetra/capability/region.hpp"

#include <algorithm>

namespace tetra::capability {

Region Region::all() { return range(0, std::numeric_limits<NodeId>::max()); }

Region Region::range(NodeId lo, NodeId hi) {
  Region r;
  if (lo < hi) r.intervals_.push_back({lo, hi});
  return r;
}

Region Region::from_intervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return i.lo >= i.hi; });
  std::sort(intervals.begin(), intervals.end());
  Region r;
  for (const auto& i : intervals) {
    if (!r.intervals_.empty() && i.lo <= r.intervals_.back().hi) {
      r.intervals_.back().hi = std::max(r.intervals_.back().hi, i.hi);
    } else {
      r.intervals_.push_back(i);
    }
  }
  return r;
}

bool Region::contains(NodeId id) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), id,
                             [](NodeId v, const Interval& i) { return v < i.lo; });
  if (it == intervals_.begin()) return false;
  --it;
  return id < it->hi;
}

bool Region::subset_of(const Region& other) const {
  // Each of our intervals must sit inside a single interval of `other`, since
  // `other` is normalized (no two intervals touch).
  std::size_t j = 0;
  for (const auto& i : intervals_) {
    while (j < other.intervals_.size() && other.intervals_[j].hi <= i.lo) ++j;
    if (j == other.intervals_.size()) return false;
    const auto& o = other.intervals_[j];
    if (o.lo > i.lo || o.hi < i.hi) return false;
  }
  return true;
}

Region Region::intersect(const Region& other) const {
  std::vector<Interval> out;
  std::size_t a = 0, b = 0;
  while (a < intervals_.size() && b < other.intervals_.size()) {
    const auto lo = std::max(intervals_[a].lo, other.intervals_[b].lo);
    const auto hi = std::min(intervals_[a].hi, other.intervals_[b].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (intervals_[a].hi < other.intervals_[b].hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return from_intervals(std::move(out));
}

Region Region::unite(const Region& other) const {
  auto merged = intervals_;
  merged.insert(merged.end(), other.intervals_.begin(), other.intervals_.end());
  return from_intervals(std::move(merged));
}

std::string Region::to_string() const {
  std::string out;
  for (const auto& i : intervals_) {
    if (!out.empty()) out += ';';
    out += std::to_string(i.lo) + '-' + std::to_string(i.hi);
  }
  return out.empty() ? "{}" : out;
}

}  // namespace tetra::capability
