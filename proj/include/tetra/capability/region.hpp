#pragma once

#include <compare>
#include <string>
#include <vector>

#include "tetra/common.hpp"

namespace tetra::capability {

// A set of node ids, held as sorted, disjoint, non-adjacent half-open intervals.
class Region {
 public:
  struct Interval {
    NodeId lo;
    NodeId hi;  // exclusive
    auto operator<=>(const Interval&) const = default;
  };

  Region() = default;
  static Region all();
  static Region range(NodeId lo, NodeId hi);
  static Region point(NodeId id) { return range(id, id + 1); }
  static Region from_intervals(std::vector<Interval> intervals);

  bool empty() const { return intervals_.empty(); }
  bool contains(NodeId id) const;
  // this ⊆ other
  bool subset_of(const Region& other) const;
  Region intersect(const Region& other) const;
  Region unite(const Region& other) const;

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::string to_string() const;

  bool operator==(const Region&) const = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace tetra::capability
