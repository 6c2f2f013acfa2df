#include "tetra/core/snapshot.hpp"

#include <algorithm>
#include <cstring>

namespace tetra::core {

namespace {

constexpr char kMagic[4] = {'S', 'N', 'A', 'P'};
constexpr std::uint32_t kVersion = 1;

cas::ContentHash read_digest(Reader& in) {
  cas::ContentHash h;
  auto raw = in.take(h.digest.size());
  std::copy(raw.begin(), raw.end(), h.digest.begin());
  return h;
}

}  // namespace

Bytes serialize(const Root& root, const std::optional<cas::ContentHash>& parent, Tick tick) {
  Bytes out;
  for (char c : kMagic) put_u8(out, static_cast<std::uint8_t>(c));
  put_u32(out, kVersion);
  put_u64(out, tick);
  put_u8(out, parent ? 1 : 0);
  if (parent) put_bytes(out, parent->digest);
  put_u64(out, root.size());
  for (const auto& [id, entry] : root) {
    put_u64(out, id);
    put_bytes(out, entry.content.digest);
    put_u64(out, entry.scope);
    put_u64(out, entry.region);
    put_u32(out, static_cast<std::uint32_t>(entry.fragments.size()));
    for (const auto& f : entry.fragments) put_bytes(out, f.digest);
  }
  return out;
}

Snapshot deserialize(ByteView bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kFormatMismatch, "not a snapshot");
  }
  Reader in(bytes.subspan(4));
  if (in.u32() != kVersion) throw Error(ErrorCode::kFormatMismatch, "snapshot version");
  Snapshot s;
  s.tick = in.u64();
  const auto has_parent = in.u8();
  if (has_parent > 1) throw Error(ErrorCode::kFormatMismatch, "parent flag");
  if (has_parent) s.parent = read_digest(in);
  const auto n = in.u64();
  std::optional<NodeId> previous;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = in.u64();
    if (previous && id <= *previous) throw Error(ErrorCode::kFormatMismatch, "root not sorted");
    previous = id;
    RootEntry entry;
    entry.content = read_digest(in);
    entry.scope = in.u64();
    entry.region = in.u64();
    const auto fragments = in.u32();
    if (fragments == 0 || fragments > in.remaining() / 32) throw Error(ErrorCode::kFormatMismatch, "fragment count");
    for (std::uint32_t f = 0; f < fragments; ++f) entry.fragments.push_back(read_digest(in));
    s.root.emplace(id, std::move(entry));
  }
  if (!in.done()) throw Error(ErrorCode::kFormatMismatch, "trailing bytes in snapshot");
  s.hash = cas::sha256(bytes);
  return s;
}

Snapshot make_snapshot(Root root, std::optional<cas::ContentHash> parent, Tick tick) {
  Snapshot s;
  s.root = std::move(root);
  s.parent = parent;
  s.tick = tick;
  s.hash = cas::sha256(serialize(s));
  return s;
}

InvariantVector invariants(const Snapshot& s) {
  InvariantVector v;
  for (const auto& [id, entry] : s.root) {
    v.content.emplace_hint(v.content.end(), id, entry.content);
    v.scopes.emplace_hint(v.scopes.end(), id, entry.scope);
    v.regions.emplace_hint(v.regions.end(), id, entry.region);
  }
  return v;
}

bool obs_equiv(const Snapshot& a, const Snapshot& b) {
  if (a.root.size() != b.root.size()) return false;
  return std::equal(a.root.begin(), a.root.end(), b.root.begin(), [](const auto& x, const auto& y) {
    return x.first == y.first && x.second.content == y.second.content && x.second.scope == y.second.scope &&
           x.second.region == y.second.region;
  });
}

}  // namespace tetra::core
