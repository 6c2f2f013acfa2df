#include "tetra/commute/event.hpp"

#include <sstream>

namespace tetra::commute {

std::string_view to_string(Projection p) {
  static constexpr std::array<std::string_view, 6> names = {"pi1", "pi2", "pi3", "pi4", "pi5", "pi6"};
  return names[index_of(p)];
}

std::size_t index_of(Projection p) { return static_cast<std::size_t>(p) - 1; }

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kInsert: return "insert";
    case EventKind::kDelete: return "delete";
    case EventKind::kMerge: return "merge";
    case EventKind::kCompact: return "compact";
    case EventKind::kTraverse: return "traverse";
    case EventKind::kUpdate: return "update";
    case EventKind::kPut: return "put";
    case EventKind::kGet: return "get";
    case EventKind::kGrant: return "grant";
    case EventKind::kRevoke: return "revoke";
    case EventKind::kAcquireLease: return "acquire-lease";
    case EventKind::kReleaseLease: return "release-lease";
  }
  return "?";
}

Projection projection_of(EventKind kind) {
  switch (kind) {
    case EventKind::kInsert:
    case EventKind::kDelete: return Projection::kPi1;
    case EventKind::kMerge:
    case EventKind::kCompact: return Projection::kPi2;
    case EventKind::kTraverse:
    case EventKind::kUpdate: return Projection::kPi3;
    case EventKind::kPut:
    case EventKind::kGet: return Projection::kPi4;
    case EventKind::kGrant:
    case EventKind::kRevoke: return Projection::kPi5;
    case EventKind::kAcquireLease:
    case EventKind::kReleaseLease: return Projection::kPi6;
  }
  throw Error(ErrorCode::kInvalidParams, "unknown event kind");
}

std::string to_string(const Event& e) {
  std::ostringstream out;
  out << to_string(e.kind);
  switch (e.kind) {
    case EventKind::kInsert:
      out << '(' << e.node << ',' << e.text;
      if (e.attach) out << ",->" << e.other;
      out << ')';
      break;
    case EventKind::kDelete: out << '(' << e.node << ')'; break;
    case EventKind::kMerge:
      out << '(';
      for (const auto& [n, v] : e.items) out << n << '=' << v << ';';
      out << ')';
      break;
    case EventKind::kCompact: break;
    case EventKind::kTraverse: out << '(' << e.node << ",k=" << e.hops << ')'; break;
    case EventKind::kUpdate:
      if (e.update == UpdateKind::kSetLabel) out << "(label " << e.node << '=' << e.text << ')';
      if (e.update == UpdateKind::kAddEdge) out << "(+edge " << e.node << "->" << e.other << ')';
      if (e.update == UpdateKind::kRemoveEdge) out << "(-edge " << e.node << "->" << e.other << ')';
      break;
    case EventKind::kPut: out << '(' << e.text.size() << "B)"; break;
    case EventKind::kGet: out << '(' << e.target << ')'; break;
    case EventKind::kGrant:
      out << "(from " << e.target << ',' << capability::to_string(e.rights) << ",ttl " << e.ttl << ',' << e.text << ')';
      break;
    case EventKind::kRevoke: out << '(' << e.target << ')'; break;
    case EventKind::kAcquireLease:
      out << '(' << (e.write ? "write" : "read") << " obj " << e.target << ", client " << e.client << ')';
      break;
    case EventKind::kReleaseLease: out << "(client " << e.client << ')'; break;
  }
  return out.str();
}

std::string to_string(const Outcome& o) {
  if (o.error) return "error:" + std::string(tetra::to_string(*o.error));
  return o.value.empty() ? "ok" : "ok:" + o.value;
}

}  // namespace tetra::commute
