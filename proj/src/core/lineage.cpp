#include "tetra/core/lineage.hpp"

#include <chrono>
#include <set>
#include <sstream>
#include <unordered_set>

namespace tetra::core {

namespace {

Bytes fetch(const cas::PackStore& store, const cas::ContentHash& h) {
  try {
    return store.get(h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) throw Error(ErrorCode::kMissingContent, h.hex());
    throw;
  }
}

NodeRecord rebuild(const cas::PackStore& store, const RootEntry& entry, std::uint32_t* fetches = nullptr) {
  std::vector<Bytes> chunks;
  chunks.reserve(entry.fragments.size());
  for (const auto& f : entry.fragments) {
    chunks.push_back(fetch(store, f));
    if (fetches) ++*fetches;
  }
  auto record = assemble(chunks);
  if (cas::sha256(encode_record(record)) != entry.content) {
    throw Error(ErrorCode::kCorruptEntry, "record does not match content hash " + entry.content.hex());
  }
  return record;
}

LineageVerdict reject(std::size_t link, const cas::ContentHash& at, std::string reason, std::size_t length) {
  LineageVerdict v;
  v.accepted = false;
  v.link = link;
  v.at = at;
  v.reason = std::move(reason);
  v.length = length;
  return v;
}

}  // namespace

Snapshot restrict(const Snapshot& s, const capability::Region& region, cas::PackStore& store) {
  Root root;
  for (const auto& [id, entry] : s.root) {
    if (!region.contains(id)) continue;
    auto record = rebuild(store, entry);
    std::erase_if(record.out, [&](const auto& edge) { return !region.contains(edge.first); });
    const auto bytes = encode_record(record);
    RootEntry e = entry;
    e.content = cas::sha256(bytes);
    if (e.content != entry.content) e.fragments = {store.put(bytes)};
    root.emplace(id, std::move(e));
  }
  return make_snapshot(std::move(root), s.parent, s.tick);
}

graph::Observation observation_from(const graph::Graph& g) {
  graph::Observation obs;
  for (const auto& [id, node] : g.nodes()) {
    obs.push(graph::AddNode{id, node.label});
    if (node.value) obs.push(graph::SetValue{id, node.value});
  }
  for (auto& edge : g.edges()) obs.push(graph::AddEdge{std::move(edge)});
  return obs;
}

LineageVerdict lineage_check(const cas::ContentHash& head, const SnapshotLoader& load, const cas::PackStore& store) {
  std::vector<Snapshot> chain;  // head first
  std::optional<cas::ContentHash> cursor = head;
  for (std::size_t link = 0; cursor; ++link) {
    Bytes bytes;
    try {
      bytes = load(*cursor);
    } catch (const Error& e) {
      return reject(link, *cursor, std::string("unreadable: ") + e.what(), link);
    }
    if (cas::sha256(bytes) != *cursor) return reject(link, *cursor, "hash mismatch", link);
    Snapshot s;
    try {
      s = deserialize(bytes);
    } catch (const Error& e) {
      return reject(link, *cursor, std::string("malformed: ") + e.what(), link);
    }
    if (!chain.empty() && s.tick >= chain.back().tick) return reject(link, *cursor, "tick not increasing", link);
    cursor = s.parent;
    chain.push_back(std::move(s));
  }

  const auto length = chain.size();
  // Forward replay: rebuild each changed record and rehash it.
  std::map<NodeId, cas::ContentHash> replayed;
  const Root empty;
  for (std::size_t i = length; i-- > 0;) {
    const auto& s = chain[i];
    const auto& prev = i + 1 < length ? chain[i + 1].root : empty;
    for (const auto& [id, entry] : prev) {
      if (!s.root.contains(id)) replayed.erase(id);
    }
    for (const auto& [id, entry] : s.root) {
      auto it = prev.find(id);
      if (it != prev.end() && it->second == entry) continue;
      try {
        replayed[id] = cas::sha256(encode_record(rebuild(store, entry)));
      } catch (const Error& e) {
        return reject(i, s.hash, std::string("replay: ") + e.what(), length);
      }
    }
  }

  LineageVerdict verdict;
  verdict.length = length;
  const auto& head_root = chain.front().root;
  for (const auto& [id, hash] : replayed) {
    auto it = head_root.find(id);
    if (it == head_root.end() || it->second.content != hash) ++verdict.replay_diff;
  }
  for (const auto& [id, entry] : head_root) {
    if (!replayed.contains(id)) ++verdict.replay_diff;
  }
  if (verdict.replay_diff != 0) {
    verdict.accepted = false;
    verdict.at = head;
    verdict.reason = "replay diverges from head";
  }
  return verdict;
}

Lineage::Lineage(cas::PackStore& store, LineageOptions options)
    : store_(store), options_(options), cache_(options.cache_capacity) {
  if (options_.max_chain == 0) throw Error(ErrorCode::kInvalidParams, "fragment bound must be at least 1");
  publish_root(Root{}, std::nullopt, 0, true);
}

std::shared_ptr<const Snapshot> Lineage::head() const {
  std::lock_guard lock(writer_);
  return head_;
}

std::shared_ptr<const Snapshot> Lineage::publish_root(Root root, std::optional<cas::ContentHash> parent, Tick tick,
                                                      bool logical) {
  auto s = std::make_shared<Snapshot>();
  s->root = std::move(root);
  s->parent = parent;
  s->tick = tick;
  const auto bytes = serialize(*s);
  s->hash = logical ? store_.put(bytes) : store_.put_maintenance(bytes);
  s->fragment_count = fragment_count(s->root);
  rows_.push_back(LineageRow{s->tick, s->hash, s->parent, s->fragment_count});
  head_ = s;
  return s;
}

std::uint32_t Lineage::fragment_count(const Root& root) const {
  std::set<std::uint32_t> segments;
  for (const auto& [id, entry] : root) {
    for (const auto& f : entry.fragments) {
      auto loc = store_.locate(f);
      if (!loc) throw Error(ErrorCode::kMissingContent, f.hex());
      segments.insert(loc->segment);
    }
  }
  return static_cast<std::uint32_t>(segments.size());
}

std::shared_ptr<const Snapshot> Lineage::commit(const graph::Observation& obs, Tick tick) {
  std::lock_guard lock(writer_);
  if (tick <= head_->tick) {
    throw Error(ErrorCode::kNonMonotoneTick,
                "tick " + std::to_string(tick) + " after " + std::to_string(head_->tick), head_->tick);
  }
  const auto touched = obs.touched_nodes(head_view_);
  std::map<NodeId, NodeRecord> before;
  for (auto id : touched) {
    if (head_view_.has_node(id)) before.emplace(id, record_of(head_view_.node(id)));
  }
  try {
    obs.apply(head_view_);
  } catch (...) {
    head_view_ = view(*head_);
    throw;
  }

  Root root = head_->root;
  for (auto id : touched) {
    if (!head_view_.has_node(id)) {
      root.erase(id);
      continue;
    }
    auto record = record_of(head_view_.node(id));
    const auto full = encode_record(record);
    const auto content = cas::sha256(full);
    auto it = root.find(id);
    if (it != root.end() && it->second.content == content) continue;

    RootEntry entry;
    entry.content = content;
    entry.scope = options_.partition.scope_of(id);
    entry.region = options_.partition.owner_of(id);
    auto old = before.find(id);
    if (it == root.end() || old == before.end() || it->second.fragments.size() >= options_.max_chain) {
      entry.fragments = {store_.put(full)};
    } else {
      entry.fragments = it->second.fragments;
      entry.fragments.push_back(store_.put(encode_delta(old->second, record)));
    }
    root[id] = std::move(entry);
    cache_.insert(content, std::make_shared<const NodeRecord>(std::move(record)));
  }
  return publish_root(std::move(root), head_->hash, tick, true);
}

graph::Graph Lineage::view(const Snapshot& s) const {
  graph::Graph g;
  std::vector<std::pair<NodeId, NodeRecord>> records;
  records.reserve(s.root.size());
  for (const auto& [id, entry] : s.root) {
    auto record = rebuild(store_, entry);
    g.add_node(id, record.label);
    if (record.value) g.set_value(id, record.value);
    records.emplace_back(id, std::move(record));
  }
  for (const auto& [id, record] : records) {
    for (const auto& [dst, type] : record.out) {
      if (!g.has_node(dst)) throw Error(ErrorCode::kCorruptEntry, "edge to missing node " + std::to_string(dst));
      g.add_edge(id, dst, type);
    }
  }
  return g;
}

std::shared_ptr<const NodeRecord> Lineage::read_node(const Snapshot& s, NodeId id, AccessRecord* access) {
  const auto start = std::chrono::steady_clock::now();
  auto it = s.root.find(id);
  if (it == s.root.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  const auto& entry = it->second;
  AccessRecord rec;
  rec.depth = static_cast<std::uint32_t>(entry.fragments.size());
  auto record = cache_.find(entry.content);
  if (record) {
    rec.hit = true;
  } else {
    record = std::make_shared<const NodeRecord>(rebuild(store_, entry, &rec.steps));
    cache_.insert(entry.content, record);
  }
  rec.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (access) *access = rec;
  return record;
}

std::shared_ptr<const Snapshot> Lineage::compact(const Snapshot& s, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidParams, "fragment bound must be at least 1");
  std::lock_guard lock(writer_);
  last_compaction_bytes_ = 0;
  bool single = true;
  for (const auto& [id, entry] : s.root) single = single && entry.fragments.size() == 1;
  if (single && fragment_count(s.root) <= k) return head_->hash == s.hash ? head_ : std::make_shared<Snapshot>(s);

  const auto before = store_.stats().physical_bytes;
  Root root = s.root;
  std::vector<cas::ContentHash> chunks;
  chunks.reserve(root.size());
  for (auto& [id, entry] : root) {
    if (entry.fragments.size() > 1) {
      const auto consolidated = store_.put_maintenance(encode_record(rebuild(store_, entry)));
      entry.fragments = {consolidated};
    }
    chunks.push_back(entry.fragments.front());
  }
  store_.relocate(chunks, std::min(k, chunks.size()));

  const bool was_head = head_->hash == s.hash;
  auto previous_head = head_;
  auto result = publish_root(std::move(root), s.parent, s.tick, false);
  if (!was_head) {
    head_ = previous_head;
  } else {
    head_view_ = view(*result);
  }
  last_compaction_bytes_ = store_.stats().physical_bytes - before;
  return result;
}

LineageVerdict Lineage::check(const Snapshot& head) const {
  const auto& store = store_;
  return lineage_check(head.hash, [&store](const cas::ContentHash& h) { return store.get(h); }, store_);
}

std::string Lineage::lineage_csv() const {
  std::ostringstream out;
  out << "tick,snapshot_hash,parent_hash,fragment_count\n";
  for (const auto& row : rows_) {
    out << row.tick << ',' << row.hash.hex() << ',' << (row.parent ? row.parent->hex() : "") << ','
        << row.fragment_count << '\n';
  }
  return out.str();
}

std::unique_ptr<Lineage> Lineage::clone(cas::PackStore& store) const {
  std::lock_guard lock(writer_);
  auto copy = std::unique_ptr<Lineage>(new Lineage(store, options_, head_, head_view_, rows_));
  return copy;
}

Lineage::Lineage(cas::PackStore& store, LineageOptions options, std::shared_ptr<const Snapshot> head,
                 graph::Graph view, std::vector<LineageRow> rows)
    : store_(store),
      options_(options),
      head_(std::move(head)),
      head_view_(std::move(view)),
      rows_(std::move(rows)),
      cache_(options.cache_capacity) {}

}  // namespace tetra::core
