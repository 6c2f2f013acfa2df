#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tetra/capability/region.hpp"

namespace tetra::capability {

// Totally ordered rights chain: none < read < traverse < write < admin.
enum class Rights : std::uint8_t { kNone = 0, kRead = 1, kTraverse = 2, kWrite = 3, kAdmin = 4 };
inline constexpr std::array<Rights, 5> kAllRights = {Rights::kNone, Rights::kRead, Rights::kTraverse,
                                                     Rights::kWrite, Rights::kAdmin};

std::string_view to_string(Rights rights);

using CapId = std::uint64_t;
inline constexpr CapId kNoCap = 0;

struct Capability {
  CapId id = kNoCap;
  Region region;
  Rights rights = Rights::kNone;
  // Ancestor ids from the root down to the direct parent. Empty for roots.
  std::vector<CapId> proof;
  Tick expiry = kNever;
  std::string subject;

  CapId parent() const { return proof.empty() ? kNoCap : proof.back(); }
};

enum class AuditEvent : std::uint8_t { kGrant, kRevoke, kDowngrade, kVerifyFail };
std::string_view to_string(AuditEvent event);

struct AuditRecord {
  Tick tick = 0;
  AuditEvent event = AuditEvent::kGrant;
  CapId cap = kNoCap;
  std::string subject;
  // Enough to replay the table: the granted or downgraded shape.
  CapId parent = kNoCap;
  Rights rights = Rights::kNone;
  Region region;
  Tick expiry = kNever;
};

enum class RejectReason : std::uint8_t {
  kNone,
  kUnknown,
  kRevoked,
  kExpired,
  kRegionNotCovered,
  kInsufficientRights,
  kBrokenProof,
};
std::string_view to_string(RejectReason reason);

struct Verdict {
  bool accepted = false;
  RejectReason reason = RejectReason::kNone;
  explicit operator bool() const { return accepted; }
};

struct RevocationEvent {
  CapId cap = kNoCap;
  Tick tick = 0;
  // Capabilities that became invalid because of this call, cap first.
  std::vector<CapId> newly_revoked;
  bool no_op() const { return newly_revoked.empty(); }
};

// Result of replaying an audit log from scratch.
struct AuditReplay {
  std::map<CapId, Capability> capabilities;
  std::set<CapId> revoked;
  std::set<CapId> live() const;
  // Number of records whose rights/region/expiry exceed their parent's.
  std::size_t escalations = 0;
};
AuditReplay replay_audit(const std::vector<AuditRecord>& log);

// The single authority over capabilities. Mutations are serialized; verify
// runs under a shared lock so it never observes half of a revocation cascade.
class CapabilityTable {
 public:
  CapabilityTable() = default;
  CapabilityTable(const CapabilityTable& other);
  CapabilityTable& operator=(const CapabilityTable&) = delete;

  Tick now() const;
  void advance(Tick ticks = 1);
  void set_now(Tick tick);

  Capability mint_root(Region region, Rights rights, Tick expiry = kNever, std::string subject = "root");

  Capability grant(const Capability& parent, const Region& region, Rights rights, Tick ttl,
                   std::string subject = {});
  RevocationEvent revoke(const Capability& cap);
  Capability downgrade(const Capability& cap, Rights new_rights);

  Verdict verify(const Capability& cap, const Region& region, Rights rights, Tick now) const;
  Verdict verify(CapId cap, const Region& region, Rights rights, Tick now) const;

  std::optional<Capability> find(CapId id) const;
  bool is_revoked(CapId id) const;
  std::vector<CapId> children(CapId id) const;
  std::set<CapId> live_ids() const;
  std::size_t size() const;

  std::vector<AuditRecord> audit_log() const;
  // `tick,event,cap_id,subject`
  std::string audit_csv() const;

 private:
  struct Entry {
    Capability cap;
    bool revoked = false;
    std::vector<CapId> children;
  };

  const Entry* lookup(CapId id) const;
  Verdict verify_locked(CapId id, const Region& region, Rights rights, Tick now) const;
  void log_locked(AuditEvent event, const Entry& entry) const;

  mutable std::shared_mutex mutex_;
  mutable std::mutex log_mutex_;
  Tick now_ = 0;
  CapId next_id_ = 1;
  std::unordered_map<CapId, Entry> entries_;
  mutable std::vector<AuditRecord> log_;
};

}  // namespace tetra::capability
