#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tetra/capability/capability_table.hpp"

namespace tetra::commute {

// The six preserved views: local order, history, adjacency, content,
// capability, ownership.
enum class Projection : std::uint8_t { kPi1 = 1, kPi2, kPi3, kPi4, kPi5, kPi6 };
inline constexpr std::array<Projection, 6> kAllProjections = {Projection::kPi1, Projection::kPi2, Projection::kPi3,
                                                              Projection::kPi4, Projection::kPi5, Projection::kPi6};
std::string_view to_string(Projection p);  // "pi1".."pi6"
std::size_t index_of(Projection p);        // 0..5

enum class EventKind : std::uint8_t {
  kInsert,
  kDelete,
  kMerge,
  kCompact,
  kTraverse,
  kUpdate,
  kPut,
  kGet,
  kGrant,
  kRevoke,
  kAcquireLease,
  kReleaseLease,
};
std::string_view to_string(EventKind kind);
Projection projection_of(EventKind kind);

enum class UpdateKind : std::uint8_t { kSetLabel, kAddEdge, kRemoveEdge };

struct Event {
  EventKind kind = EventKind::kInsert;
  // insert/delete/update/traverse subject node; update edge target in `other`.
  NodeId node = 0;
  NodeId other = 0;
  bool attach = false;  // insert also links node -> other
  UpdateKind update = UpdateKind::kSetLabel;
  unsigned hops = 0;
  // Label, payload, or grant subject.
  std::string text;
  // merge: (node, value tag) writes folded in as one change set.
  std::vector<std::pair<NodeId, std::string>> items;
  // get: content index; grant: parent cap; revoke: cap; lease ops: object.
  std::uint64_t target = 0;
  std::uint64_t client = 0;  // lease holder slot
  bool write = false;        // lease mode
  capability::Rights rights = capability::Rights::kNone;
  Tick ttl = 0;

  Projection projection() const { return projection_of(kind); }
  bool operator==(const Event&) const = default;
};

std::string to_string(const Event& e);

// What the issuer observes: success with an optional read result, or an error.
struct Outcome {
  std::optional<ErrorCode> error;
  std::string value;

  bool ok() const { return !error; }
  bool operator==(const Outcome&) const = default;
};

std::string to_string(const Outcome& o);

}  // namespace tetra::commute
