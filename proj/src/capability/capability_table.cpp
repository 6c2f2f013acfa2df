#include "tetra/capability/capability_table.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace tetra::capability {

std::string_view to_string(Rights rights) {
  switch (rights) {
    case Rights::kNone: return "none";
    case Rights::kRead: return "read";
    case Rights::kTraverse: return "traverse";
    case Rights::kWrite: return "write";
    case Rights::kAdmin: return "admin";
  }
  return "?";
}

std::string_view to_string(AuditEvent event) {
  switch (event) {
    case AuditEvent::kGrant: return "grant";
    case AuditEvent::kRevoke: return "revoke";
    case AuditEvent::kDowngrade: return "downgrade";
    case AuditEvent::kVerifyFail: return "verify-fail";
  }
  return "?";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone: return "none";
    case RejectReason::kUnknown: return "unknown";
    case RejectReason::kRevoked: return "revoked";
    case RejectReason::kExpired: return "expired";
    case RejectReason::kRegionNotCovered: return "region-not-covered";
    case RejectReason::kInsufficientRights: return "insufficient-rights";
    case RejectReason::kBrokenProof: return "broken-proof";
  }
  return "?";
}

namespace {

Tick saturating_add(Tick a, Tick b) { return a > kNever - b ? kNever : a + b; }

}  // namespace

CapabilityTable::CapabilityTable(const CapabilityTable& other) {
  std::shared_lock lock(other.mutex_);
  std::lock_guard log_lock(other.log_mutex_);
  now_ = other.now_;
  next_id_ = other.next_id_;
  entries_ = other.entries_;
  log_ = other.log_;
}

Tick CapabilityTable::now() const {
  std::shared_lock lock(mutex_);
  return now_;
}

void CapabilityTable::advance(Tick ticks) {
  std::unique_lock lock(mutex_);
  now_ = saturating_add(now_, ticks);
}

void CapabilityTable::set_now(Tick tick) {
  std::unique_lock lock(mutex_);
  if (tick < now_) throw Error(ErrorCode::kNonMonotoneTick, "clock cannot move backwards");
  now_ = tick;
}

const CapabilityTable::Entry* CapabilityTable::lookup(CapId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

void CapabilityTable::log_locked(AuditEvent event, const Entry& entry) const {
  std::lock_guard log_lock(log_mutex_);
  log_.push_back(AuditRecord{now_, event, entry.cap.id, entry.cap.subject, entry.cap.parent(), entry.cap.rights,
                             entry.cap.region, entry.cap.expiry});
}

Capability CapabilityTable::mint_root(Region region, Rights rights, Tick expiry, std::string subject) {
  std::unique_lock lock(mutex_);
  Entry entry;
  entry.cap.id = next_id_++;
  entry.cap.region = std::move(region);
  entry.cap.rights = rights;
  entry.cap.expiry = expiry;
  entry.cap.subject = std::move(subject);
  auto [it, _] = entries_.emplace(entry.cap.id, std::move(entry));
  log_locked(AuditEvent::kGrant, it->second);
  return it->second.cap;
}

Capability CapabilityTable::grant(const Capability& parent, const Region& region, Rights rights, Tick ttl,
                                  std::string subject) {
  std::unique_lock lock(mutex_);
  auto it = entries_.find(parent.id);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownCapability, std::to_string(parent.id));
  auto& p = it->second;
  if (p.revoked) throw Error(ErrorCode::kParentRevoked, std::to_string(parent.id));
  if (now_ >= p.cap.expiry) throw Error(ErrorCode::kParentExpired, std::to_string(parent.id));
  if (!region.subset_of(p.cap.region)) {
    throw Error(ErrorCode::kIllegalEscalation, "region " + region.to_string() + " not within " + p.cap.region.to_string());
  }
  if (rights > p.cap.rights) {
    throw Error(ErrorCode::kIllegalEscalation,
                std::string(to_string(rights)) + " exceeds " + std::string(to_string(p.cap.rights)));
  }

  Entry child;
  child.cap.id = next_id_++;
  child.cap.region = region.intersect(p.cap.region);
  child.cap.rights = std::min(rights, p.cap.rights);
  child.cap.expiry = std::min(saturating_add(now_, ttl), p.cap.expiry);
  child.cap.proof = p.cap.proof;
  child.cap.proof.push_back(p.cap.id);
  child.cap.subject = subject.empty() ? p.cap.subject : std::move(subject);
  p.children.push_back(child.cap.id);
  auto [cit, _] = entries_.emplace(child.cap.id, std::move(child));
  log_locked(AuditEvent::kGrant, cit->second);
  return cit->second.cap;
}

RevocationEvent CapabilityTable::revoke(const Capability& cap) {
  std::unique_lock lock(mutex_);
  auto it = entries_.find(cap.id);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownCapability, std::to_string(cap.id));
  RevocationEvent event{cap.id, now_, {}};
  std::deque<CapId> pending{cap.id};
  while (!pending.empty()) {
    auto& entry = entries_.at(pending.front());
    pending.pop_front();
    if (entry.revoked) continue;
    entry.revoked = true;
    event.newly_revoked.push_back(entry.cap.id);
    log_locked(AuditEvent::kRevoke, entry);
    pending.insert(pending.end(), entry.children.begin(), entry.children.end());
  }
  return event;
}

Capability CapabilityTable::downgrade(const Capability& cap, Rights new_rights) {
  std::unique_lock lock(mutex_);
  auto it = entries_.find(cap.id);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownCapability, std::to_string(cap.id));
  if (it->second.revoked) throw Error(ErrorCode::kParentRevoked, std::to_string(cap.id));
  if (new_rights > it->second.cap.rights) {
    throw Error(ErrorCode::kIllegalEscalation, "downgrade cannot raise " + std::string(to_string(it->second.cap.rights)) +
                                                   " to " + std::string(to_string(new_rights)));
  }
  // Clamp the whole subtree so children never outrank their parent.
  std::deque<CapId> pending{cap.id};
  while (!pending.empty()) {
    auto& entry = entries_.at(pending.front());
    pending.pop_front();
    if (entry.cap.rights <= new_rights && entry.cap.id != cap.id) continue;
    if (entry.cap.rights != new_rights) {
      entry.cap.rights = std::min(entry.cap.rights, new_rights);
      log_locked(AuditEvent::kDowngrade, entry);
    }
    pending.insert(pending.end(), entry.children.begin(), entry.children.end());
  }
  return it->second.cap;
}

Verdict CapabilityTable::verify_locked(CapId id, const Region& region, Rights rights, Tick now) const {
  const Entry* entry = lookup(id);
  if (!entry) return {false, RejectReason::kUnknown};
  const auto& cap = entry->cap;
  if (entry->revoked) return {false, RejectReason::kRevoked};
  if (now >= cap.expiry) return {false, RejectReason::kExpired};
  if (!region.subset_of(cap.region)) return {false, RejectReason::kRegionNotCovered};
  if (rights > cap.rights) return {false, RejectReason::kInsufficientRights};
  // Walk the chain parent-first and check every link.
  const Capability* child = &cap;
  for (auto p = cap.proof.rbegin(); p != cap.proof.rend(); ++p) {
    const Entry* parent = lookup(*p);
    if (!parent || parent->revoked || now >= parent->cap.expiry || child->rights > parent->cap.rights ||
        !child->region.subset_of(parent->cap.region) || child->expiry > parent->cap.expiry) {
      return {false, RejectReason::kBrokenProof};
    }
    child = &parent->cap;
  }
  return {true, RejectReason::kNone};
}

Verdict CapabilityTable::verify(CapId cap, const Region& region, Rights rights, Tick now) const {
  std::shared_lock lock(mutex_);
  auto verdict = verify_locked(cap, region, rights, now);
  if (!verdict) {
    std::lock_guard log_lock(log_mutex_);
    const Entry* entry = lookup(cap);
    AuditRecord rec{now_, AuditEvent::kVerifyFail, cap, entry ? entry->cap.subject : std::string{}};
    if (entry) {
      rec.parent = entry->cap.parent();
      rec.rights = entry->cap.rights;
      rec.region = entry->cap.region;
      rec.expiry = entry->cap.expiry;
    }
    log_.push_back(std::move(rec));
  }
  return verdict;
}

Verdict CapabilityTable::verify(const Capability& cap, const Region& region, Rights rights, Tick now) const {
  return verify(cap.id, region, rights, now);
}

std::optional<Capability> CapabilityTable::find(CapId id) const {
  std::shared_lock lock(mutex_);
  const Entry* entry = lookup(id);
  if (!entry) return std::nullopt;
  return entry->cap;
}

bool CapabilityTable::is_revoked(CapId id) const {
  std::shared_lock lock(mutex_);
  const Entry* entry = lookup(id);
  if (!entry) throw Error(ErrorCode::kUnknownCapability, std::to_string(id));
  return entry->revoked;
}

std::vector<CapId> CapabilityTable::children(CapId id) const {
  std::shared_lock lock(mutex_);
  const Entry* entry = lookup(id);
  if (!entry) throw Error(ErrorCode::kUnknownCapability, std::to_string(id));
  return entry->children;
}

std::set<CapId> CapabilityTable::live_ids() const {
  std::shared_lock lock(mutex_);
  std::set<CapId> out;
  for (const auto& [id, entry] : entries_) {
    if (!entry.revoked) out.insert(id);
  }
  return out;
}

std::size_t CapabilityTable::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<AuditRecord> CapabilityTable::audit_log() const {
  std::lock_guard log_lock(log_mutex_);
  return log_;
}

std::string CapabilityTable::audit_csv() const {
  std::ostringstream out;
  out << "tick,event,cap_id,subject\n";
  for (const auto& rec : audit_log()) {
    out << rec.tick << ',' << to_string(rec.event) << ',' << rec.cap << ',' << rec.subject << '\n';
  }
  return out.str();
}

std::set<CapId> AuditReplay::live() const {
  std::set<CapId> out;
  for (const auto& [id, cap] : capabilities) {
    if (!revoked.contains(id)) out.insert(id);
  }
  return out;
}

AuditReplay replay_audit(const std::vector<AuditRecord>& log) {
  AuditReplay replay;
  for (const auto& rec : log) {
    switch (rec.event) {
      case AuditEvent::kGrant: {
        Capability cap;
        cap.id = rec.cap;
        cap.region = rec.region;
        cap.rights = rec.rights;
        cap.expiry = rec.expiry;
        cap.subject = rec.subject;
        if (rec.parent != kNoCap) {
          auto pit = replay.capabilities.find(rec.parent);
          if (pit == replay.capabilities.end()) {
            ++replay.escalations;
          } else {
            const auto& parent = pit->second;
            if (cap.rights > parent.rights || !cap.region.subset_of(parent.region) || cap.expiry > parent.expiry) {
              ++replay.escalations;
            }
            cap.proof = parent.proof;
            cap.proof.push_back(parent.id);
          }
        }
        replay.capabilities[cap.id] = std::move(cap);
        break;
      }
      case AuditEvent::kRevoke:
        replay.revoked.insert(rec.cap);
        break;
      case AuditEvent::kDowngrade: {
        auto it = replay.capabilities.find(rec.cap);
        if (it == replay.capabilities.end() || rec.rights > it->second.rights) {
          ++replay.escalations;
        } else {
          it->second.rights = rec.rights;
        }
        break;
      }
      case AuditEvent::kVerifyFail:
        break;
    }
  }
  return replay;
}

}  // namespace tetra::capability
