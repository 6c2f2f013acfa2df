#include "adapters.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

#include "tetra/bench/workload.hpp"
#include "tetra/core/engine.hpp"
#include "tetra/graph/traversal.hpp"

namespace tetra::commute {

namespace {

using capability::Capability;
using capability::Rights;

Outcome failure(const Error& e) { return Outcome{e.code(), {}}; }

std::string join_ids(const std::vector<NodeId>& ids) {
  std::string out;
  for (auto id : ids) {
    out += std::to_string(id);
    out += ',';
  }
  return out;
}

// Text rendering of a graph: labels, values and sorted out-edges per node.
std::string render(const graph::Graph& g) {
  std::ostringstream out;
  for (const auto& [id, node] : g.nodes()) {
    out << id << ' ' << node.label << ' ' << (node.value ? node.value->hex() : "-");
    for (const auto& [dst, type] : node.out) out << ' ' << dst << ':' << type;
    out << '\n';
  }
  return out.str();
}

void graph_universe(const graph::Graph& g, Universe& u) {
  for (const auto& [id, node] : g.nodes()) {
    u.nodes.push_back(id);
    for (const auto& [dst, type] : node.out) u.edges.emplace_back(id, dst);
  }
  u.fresh = g.next_id();
  u.labels = {"a", "b"};
}

// Mutations an event asks the graph owner to make.
std::vector<graph::Mutation> mutations_of(const Event& e) {
  std::vector<graph::Mutation> ops;
  switch (e.kind) {
    case EventKind::kInsert:
      ops.push_back(graph::AddNode{e.node, e.text});
      if (e.attach) ops.push_back(graph::AddEdge{{e.node, e.other, "link"}});
      break;
    case EventKind::kDelete: ops.push_back(graph::RemoveNode{e.node}); break;
    case EventKind::kMerge:
      for (const auto& [node, tag] : e.items) ops.push_back(graph::SetValue{node, value_of(tag)});
      break;
    case EventKind::kUpdate:
      if (e.update == UpdateKind::kSetLabel) ops.push_back(graph::SetLabel{e.node, e.text});
      if (e.update == UpdateKind::kAddEdge) ops.push_back(graph::AddEdge{{e.node, e.other, "link"}});
      if (e.update == UpdateKind::kRemoveEdge) ops.push_back(graph::RemoveEdge{{e.node, e.other, "link"}});
      break;
    default: break;
  }
  return ops;
}

void stage(graph::Editor& editor, const graph::Mutation& m) {
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, graph::AddNode>) {
          if (editor.staged().has_node(op.id)) throw Error(ErrorCode::kInvalidParams, "node exists");
          editor.add_node(op.id, op.label);
        } else if constexpr (std::is_same_v<T, graph::RemoveNode>) {
          editor.remove_node(op.id);
        } else if constexpr (std::is_same_v<T, graph::SetLabel>) {
          editor.set_label(op.id, op.label);
        } else if constexpr (std::is_same_v<T, graph::SetValue>) {
          if (!editor.staged().has_node(op.id)) throw Error(ErrorCode::kUnknownNode, std::to_string(op.id));
          editor.set_value(op.id, op.value);
        } else if constexpr (std::is_same_v<T, graph::AddEdge>) {
          if (editor.staged().has_node(op.edge.src) && editor.staged().has_edge(op.edge)) {
            throw Error(ErrorCode::kInvalidParams, "edge exists");
          }
          editor.add_edge(op.edge.src, op.edge.dst, op.edge.type);
        } else {
          editor.remove_edge(op.edge);
        }
      },
      m);
}

// ---------------------------------------------------------------------------
// The composed engine. Reads in a window see the window's base snapshot;
// owner writes are staged and applied in canonical order at the window end;
// lease requests are arbitrated in canonical order after releases.
class EngineAdapter final : public Adapter {
 public:
  explicit EngineAdapter(const InitialState& init) : shape_(init.shape) {
    core::EngineOptions options;
    options.store.segment_bytes = 16 << 10;
    options.lineage.partition.owner_width = init.shape.owner_width;
    engine_ = std::make_unique<core::Engine>(options);
    root_ = engine_->capabilities().mint_root(capability::Region::all(), Rights::kAdmin).id;
    for (ObjectId o = 0; o < init.shape.objects; ++o) engine_->leases().release(engine_->leases().create(o));
    auto obs = core::observation_from(init.graph);
    for (const auto& [node, tag] : init.merged) obs.push(graph::SetValue{node, value_of(tag)});
    engine_->lineage().commit(obs, 1);
  }

  EngineAdapter(const EngineAdapter& other)
      : shape_(other.shape_), engine_(other.engine_->clone()), root_(other.root_), holds_(other.holds_) {}

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<EngineAdapter>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick tick) override {
    std::vector<Outcome> out(events.size());
    struct Candidate {
      std::size_t index;
      std::vector<graph::Mutation> ops;
    };
    std::vector<Candidate> writes;
    std::vector<std::size_t> releases, acquires;
    bool compact = false;
    const auto base = engine_->lineage().head();
    const auto& view = engine_->lineage().head_view();

    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      switch (e.kind) {
        case EventKind::kTraverse:
          try {
            out[i].value = join_ids(graph::traverse_khop(view, e.node, e.hops, engine_->context(root_, tick)));
          } catch (const Error& err) {
            out[i] = failure(err);
          }
          break;
        case EventKind::kCompact: compact = true; break;
        case EventKind::kAcquireLease: acquires.push_back(i); break;
        case EventKind::kReleaseLease: releases.push_back(i); break;
        default: writes.push_back({i, graph::Observation(mutations_of(e)).canonical().ops()});
      }
    }

    std::sort(releases.begin(), releases.end(),
              [&](auto a, auto b) { return events[a].client < events[b].client; });
    for (auto i : releases) {
      auto it = holds_.find(events[i].client);
      if (it == holds_.end()) {
        out[i] = Outcome{ErrorCode::kDoubleRelease, {}};
        continue;
      }
      std::visit([&](const auto& lease) { engine_->leases().release(lease); }, it->second.lease);
      holds_.erase(it);
    }

    std::stable_sort(writes.begin(), writes.end(), [](const auto& a, const auto& b) { return a.ops < b.ops; });
    commit_window(writes, out, tick);
    if (compact) engine_->lineage().compact(*engine_->lineage().head(), 1);
    (void)base;

    std::sort(acquires.begin(), acquires.end(), [&](auto a, auto b) {
      const auto& x = events[a];
      const auto& y = events[b];
      return std::tuple(x.target, !x.write, x.client) < std::tuple(y.target, !y.write, y.client);
    });
    for (auto i : acquires) {
      const auto& e = events[i];
      if (holds_.contains(e.client)) {
        out[i] = Outcome{ErrorCode::kInvalidParams, {}};
        continue;
      }
      try {
        Hold hold;
        hold.object = e.target;
        hold.write = e.write;
        if (e.write) {
          hold.lease = engine_->leases().acquire_write(e.target, tick);
        } else {
          hold.lease = engine_->leases().acquire_read(e.target, tick);
        }
        holds_[e.client] = hold;
      } catch (const Error& err) {
        out[i] = failure(err);
      }
    }
    return out;
  }

  void observe(Observed& out) const override {
    out.snapshot = engine_->lineage().head();
    std::ostringstream aux;
    aux << "leases:";
    auto objects = engine_->leases().objects();
    std::sort(objects.begin(), objects.end());
    for (auto o : objects) {
      const auto s = engine_->leases().state(o);
      aux << o << '/' << s.readers << '/' << s.writer << '/' << s.version << ';';
    }
    aux << "holds:";
    for (const auto& [client, hold] : holds_) aux << client << '=' << hold.object << (hold.write ? 'w' : 'r') << ';';
    out.aux += aux.str();
  }

  void universe(Projection p, Universe& u) const override {
    if (p == Projection::kPi6) {
      u.objects = shape_.objects;
      u.clients = shape_.clients;
      for (const auto& [client, hold] : holds_) u.holds[client] = {hold.object, hold.write};
      return;
    }
    graph_universe(engine_->lineage().head_view(), u);
  }

  std::string serialize_full() const override {
    const auto& lineage = engine_->lineage();
    const auto g = lineage.view(*lineage.head());
    std::ostringstream out;
    out << "graph\n";
    const auto& partition = lineage.options().partition;
    for (const auto& [id, node] : g.nodes()) {
      out << id << " scope " << partition.scope_of(id) << " owner " << partition.owner_of(id) << '\n';
    }
    out << render(g);
    Observed leases;
    observe(leases);
    out << leases.aux << '\n';
    return out.str();
  }

 private:
  struct Hold {
    ObjectId object = 0;
    bool write = false;
    std::variant<ownership::ReadLease, ownership::WriteLease> lease;
  };

  template <class Candidates>
  void commit_window(const Candidates& writes, std::vector<Outcome>& out, Tick tick) {
    auto& leases = engine_->leases();
    const auto& partition = engine_->lineage().options().partition;
    std::set<ObjectId> objects;
    for (auto o : leases.objects()) objects.insert(o);
    for (const auto& c : writes) {
      for (const auto& op : c.ops) objects.insert(partition.owner_of(graph::primary_node(op)));
    }
    std::vector<ownership::WriteLease> held;
    for (auto o : objects) {
      try {
        held.push_back(leases.exists(o) ? leases.acquire_write(o, tick) : leases.create(o, tick));
      } catch (const Error&) {
        // A client still holds it; writes to its nodes fail below.
      }
    }
    std::optional<graph::Editor> editor;
    editor.emplace(engine_->lineage().head_view(), engine_->context(root_, tick), leases, held, partition);
    for (const auto& c : writes) {
      graph::Editor trial = *editor;
      try {
        for (const auto& op : c.ops) stage(trial, op);
        editor.emplace(std::move(trial));
      } catch (const Error& err) {
        out[c.index] = failure(err);
      }
    }
    auto snapshot = engine_->lineage().commit(editor->observation(), tick);
    for (const auto& lease : held) {
      leases.commit(lease, core::encode_object_head(lease.object, snapshot->hash), engine_->store(), tick);
      leases.release(lease);
    }
  }

  StateShape shape_;
  std::unique_ptr<core::Engine> engine_;
  capability::CapId root_ = capability::kNoCap;
  std::map<std::uint64_t, Hold> holds_;
};

// ---------------------------------------------------------------------------
// Nodes kept in arrival order on fixed pages; the layout is what it stores.
class PageStore final : public Adapter {
 public:
  explicit PageStore(const InitialState& init) {
    for (const auto& [id, node] : init.graph.nodes()) slots_.emplace_back(id, node.label);
  }

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<PageStore>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick) override {
    std::vector<Outcome> out(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      if (e.kind == EventKind::kInsert) {
        if (find(e.node) != slots_.end()) {
          out[i] = Outcome{ErrorCode::kInvalidParams, {}};
        } else if (e.attach && find(e.other) == slots_.end()) {
          out[i] = Outcome{ErrorCode::kUnknownNode, {}};
        } else {
          slots_.emplace_back(e.node, e.text);
          if (e.attach) links_.emplace(e.node, e.other);
        }
      } else if (e.kind == EventKind::kDelete) {
        auto it = find(e.node);
        if (it == slots_.end()) {
          out[i] = Outcome{ErrorCode::kUnknownNode, {}};
          continue;
        }
        slots_.erase(it);
        std::erase_if(links_, [&](const auto& l) { return l.first == e.node || l.second == e.node; });
      }
    }
    return out;
  }

  void observe(Observed& out) const override { out.aux += "pages:" + serialize_full(); }

  void universe(Projection, Universe& u) const override {
    for (const auto& [id, label] : slots_) {
      u.nodes.push_back(id);
      u.fresh = std::max(u.fresh, id + 1);
    }
    u.labels = {"a", "b"};
  }

  std::string serialize_full() const override {
    std::ostringstream out;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      out << "page " << i / kSlotsPerPage << " slot " << i % kSlotsPerPage << ' ' << slots_[i].first << ' '
          << slots_[i].second << '\n';
    }
    for (const auto& [a, b] : links_) out << "link " << a << ' ' << b << '\n';
    return out.str();
  }

 private:
  static constexpr std::size_t kSlotsPerPage = 8;

  std::vector<std::pair<NodeId, std::string>>::iterator find(NodeId id) {
    return std::find_if(slots_.begin(), slots_.end(), [&](const auto& s) { return s.first == id; });
  }

  std::vector<std::pair<NodeId, std::string>> slots_;
  std::set<std::pair<NodeId, NodeId>> links_;
};

// ---------------------------------------------------------------------------
// Change sets appended without sequence numbers; compaction can only order
// entries by their digest. State is the last write per node.
class MergeLog final : public Adapter {
 public:
  explicit MergeLog(const InitialState& init) : log_(init.merged) {
    for (const auto& [id, node] : init.graph.nodes()) nodes_.push_back(id);
  }

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<MergeLog>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick) override {
    std::vector<Outcome> out(events.size());
    for (const auto& e : events) {
      if (e.kind == EventKind::kMerge) {
        log_.insert(log_.end(), e.items.begin(), e.items.end());
      } else if (e.kind == EventKind::kCompact) {
        auto key = [](const std::pair<NodeId, std::string>& entry) {
          return value_of(std::to_string(entry.first) + "=" + entry.second).hex();
        };
        std::sort(log_.begin(), log_.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
        log_.erase(std::unique(log_.begin(), log_.end()), log_.end());
      }
    }
    return out;
  }

  void observe(Observed& out) const override { out.aux += "merged:" + serialize_full(); }

  void universe(Projection, Universe& u) const override {
    u.nodes = nodes_;
    u.labels = {"a", "b"};
  }

  std::string serialize_full() const override {
    std::map<NodeId, std::string> folded;
    for (const auto& [node, tag] : log_) folded[node] = tag;
    std::ostringstream out;
    for (const auto& [node, tag] : folded) out << node << '=' << tag << ';';
    return out.str();
  }

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::pair<NodeId, std::string>> log_;
};

// ---------------------------------------------------------------------------
// One mutable graph and one value register per object, shared by everyone
// with no snapshots and no leases. Reads see whatever is there right now.
class SharedGraph final : public Adapter {
 public:
  explicit SharedGraph(const InitialState& init)
      : shape_(init.shape), graph_(init.graph), registers_(init.shape.objects, 0) {}

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<SharedGraph>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick) override {
    std::vector<Outcome> out(events.size());
    graph::AccessContext ctx;
    ctx.options.enforce_capability = false;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      try {
        switch (e.kind) {
          case EventKind::kTraverse: out[i].value = join_ids(graph::traverse_khop(graph_, e.node, e.hops, ctx)); break;
          case EventKind::kUpdate:
            if (e.update == UpdateKind::kSetLabel) graph_.set_label(e.node, e.text);
            if (e.update == UpdateKind::kAddEdge) {
              if (graph_.has_node(e.node) && graph_.has_edge({e.node, e.other, "link"})) {
                throw Error(ErrorCode::kInvalidParams, "edge exists");
              }
              graph_.add_edge(e.node, e.other, "link");
            }
            if (e.update == UpdateKind::kRemoveEdge) graph_.remove_edge({e.node, e.other, "link"});
            break;
          case EventKind::kAcquireLease:
            if (e.target >= registers_.size()) throw Error(ErrorCode::kUnknownObject, std::to_string(e.target));
            if (e.write) {
              registers_[e.target] = e.client + 1;
            } else {
              out[i].value = std::to_string(registers_[e.target]);
            }
            break;
          default: break;
        }
      } catch (const Error& err) {
        out[i] = failure(err);
      }
    }
    return out;
  }

  void observe(Observed& out) const override { out.aux += "shared:" + serialize_full(); }

  void universe(Projection p, Universe& u) const override {
    if (p == Projection::kPi6) {
      u.objects = shape_.objects;
      u.clients = shape_.clients;
      return;
    }
    graph_universe(graph_, u);
  }

  std::string serialize_full() const override {
    std::string out = render(graph_);
    for (auto r : registers_) out += "reg " + std::to_string(r) + '\n';
    return out;
  }

 private:
  StateShape shape_;
  graph::Graph graph_;
  std::vector<std::uint64_t> registers_;
};

// ---------------------------------------------------------------------------
class ContentStore final : public Adapter {
 public:
  explicit ContentStore(const InitialState& init) {
    cas::StoreOptions options;
    options.segment_bytes = 16 << 10;
    store_ = std::make_unique<cas::PackStore>(options);
    for (const auto& p : init.payloads) put(p);
  }

  ContentStore(const ContentStore& other) : store_(other.store_->clone()), contents_(other.contents_) {}

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<ContentStore>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick) override {
    std::vector<Outcome> out(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      try {
        if (e.kind == EventKind::kPut) out[i].value = put(e.text).hex();
        if (e.kind == EventKind::kGet) {
          if (e.target >= contents_.size()) throw Error(ErrorCode::kNotFound, std::to_string(e.target));
          out[i].value = cas::sha256(store_->get(contents_[e.target])).hex();
        }
      } catch (const Error& err) {
        out[i] = failure(err);
      }
    }
    return out;
  }

  void observe(Observed& out) const override {
    std::set<std::string> hashes;
    for (const auto& h : contents_) hashes.insert(h.hex());
    out.aux += "cas:";
    for (const auto& h : hashes) out.aux += h + ';';
  }

  void universe(Projection, Universe& u) const override { u.contents = contents_.size(); }

  std::string serialize_full() const override {
    std::set<std::string> rows;
    for (const auto& h : contents_) {
      const auto bytes = store_->get(h);
      rows.insert(tetra::to_string(bytes));
    }
    std::string out = "blobs\n";
    for (const auto& r : rows) out += r + '\n';
    return out + "objects " + std::to_string(store_->object_count()) + '\n';
  }

 private:
  cas::ContentHash put(const std::string& payload) {
    const auto h = store_->put(to_bytes(payload));
    if (std::find(contents_.begin(), contents_.end(), h) == contents_.end()) contents_.push_back(h);
    return h;
  }

  std::unique_ptr<cas::PackStore> store_;
  std::vector<cas::ContentHash> contents_;
};

// Location-addressed blob store without deduplication.
class LocationStore final : public Adapter {
 public:
  explicit LocationStore(const InitialState& init) : blobs_(init.payloads) {}

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<LocationStore>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick) override {
    std::vector<Outcome> out(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      if (e.kind == EventKind::kPut) {
        out[i].value = std::to_string(blobs_.size());
        blobs_.push_back(e.text);
      } else if (e.kind == EventKind::kGet) {
        if (e.target >= blobs_.size()) {
          out[i] = Outcome{ErrorCode::kNotFound, {}};
        } else {
          out[i].value = value_of(blobs_[e.target]).hex();
        }
      }
    }
    return out;
  }

  void observe(Observed& out) const override { out.aux += "blobs:" + serialize_full(); }

  void universe(Projection, Universe& u) const override { u.contents = blobs_.size(); }

  std::string serialize_full() const override {
    std::string out;
    for (std::size_t i = 0; i < blobs_.size(); ++i) out += std::to_string(i) + ' ' + blobs_[i] + '\n';
    return out;
  }

 private:
  std::vector<std::string> blobs_;
};

// ---------------------------------------------------------------------------
std::string describe(const Capability& c) {
  return c.subject + '|' + std::string(capability::to_string(c.rights)) + '|' + c.region.to_string() + '|' +
         (c.expiry == kNever ? std::string("inf") : std::to_string(c.expiry));
}

// The live capability table. Grants and revocations take effect immediately.
class CapabilityAdapter final : public Adapter {
 public:
  explicit CapabilityAdapter(const InitialState& init) {
    std::vector<Capability> made{table_.mint_root(capability::Region::all(), Rights::kAdmin)};
    for (const auto& g : init.grants) {
      const auto& parent = made.at(g.parent);
      made.push_back(table_.grant(parent, parent.region, std::min(g.rights, parent.rights), g.ttl, g.subject));
    }
  }

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<CapabilityAdapter>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick tick) override {
    std::vector<Outcome> out(events.size());
    table_.set_now(tick);
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      try {
        auto cap = table_.find(e.target);
        if (!cap) throw Error(ErrorCode::kUnknownCapability, std::to_string(e.target));
        if (e.kind == EventKind::kGrant) {
          out[i].value = describe(table_.grant(*cap, cap->region, e.rights, e.ttl, e.text));
        } else if (e.kind == EventKind::kRevoke) {
          table_.revoke(*cap);
        }
      } catch (const Error& err) {
        out[i] = failure(err);
      }
    }
    return out;
  }

  void observe(Observed& out) const override {
    std::multiset<std::string> live;
    for (auto id : table_.live_ids()) {
      auto cap = *table_.find(id);
      std::string chain;
      for (auto a : cap.proof) chain += table_.find(a)->subject + '/';
      live.insert(describe(cap) + '|' + chain);
    }
    out.aux += "caps:";
    for (const auto& s : live) out.aux += s + ';';
  }

  void universe(Projection, Universe& u) const override {
    for (auto id : table_.live_ids()) {
      auto cap = *table_.find(id);
      if (cap.expiry > table_.now()) u.caps.push_back(std::move(cap));
    }
  }

  std::string serialize_full() const override {
    // Verification matrix over a few probe regions and every rights level.
    std::vector<std::string> rows;
    for (const auto& [id, subject] : subjects()) {
      auto cap = *table_.find(id);
      std::string chain;
      for (auto a : cap.proof) chain += table_.find(a)->subject + '/';
      std::string row = describe(cap) + " chain " + chain + " verify ";
      for (NodeId probe : {NodeId{0}, NodeId{5}, NodeId{1000}}) {
        for (auto r : capability::kAllRights) {
          row += table_.verify(cap, capability::Region::point(probe), r, table_.now()) ? '1' : '0';
        }
      }
      rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end());
    std::string out = "caps\n";
    for (const auto& r : rows) out += r + '\n';
    return out;
  }

 private:
  std::vector<std::pair<capability::CapId, std::string>> subjects() const {
    std::vector<std::pair<capability::CapId, std::string>> out;
    for (capability::CapId id = 1; auto cap = table_.find(id); ++id) out.emplace_back(id, cap->subject);
    return out;
  }

  capability::CapabilityTable table_;
};

// Flat access list: no proof chains, no containment checks, no cascade.
class FlatAcl final : public Adapter {
 public:
  explicit FlatAcl(const InitialState& init) {
    add(capability::Region::all(), Rights::kAdmin, kNever, "root", 0);
    for (const auto& g : init.grants) {
      const auto parent = g.parent + 1;
      add(entries_.at(parent).region, std::min(g.rights, entries_.at(parent).rights), g.ttl, g.subject, parent);
    }
  }

  std::unique_ptr<Adapter> clone() const override { return std::make_unique<FlatAcl>(*this); }

  std::vector<Outcome> run(std::span<const Event> events, Tick tick) override {
    std::vector<Outcome> out(events.size());
    now_ = tick;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      auto it = entries_.find(e.target);
      if (e.kind == EventKind::kGrant) {
        // No parent check: the region is taken from the parent when it still exists.
        const auto region = it != entries_.end() ? it->second.region : capability::Region::all();
        out[i].value = describe(entries_.at(add(region, e.rights, now_ + e.ttl, e.text, e.target)));
      } else if (e.kind == EventKind::kRevoke) {
        if (it == entries_.end()) {
          out[i] = Outcome{ErrorCode::kUnknownCapability, {}};
        } else {
          entries_.erase(it);
        }
      }
    }
    return out;
  }

  void observe(Observed& out) const override { out.aux += "acl:" + serialize_full(); }

  void universe(Projection, Universe& u) const override {
    for (const auto& [id, c] : entries_) {
      if (c.expiry > now_) u.caps.push_back(c);
    }
  }

  std::string serialize_full() const override {
    std::multiset<std::string> rows;
    for (const auto& [id, c] : entries_) rows.insert(describe(c));
    std::string out;
    for (const auto& r : rows) out += r + '\n';
    return out;
  }

 private:
  capability::CapId add(capability::Region region, Rights rights, Tick expiry, std::string subject,
                        capability::CapId parent) {
    Capability c;
    c.id = next_++;
    c.region = std::move(region);
    c.rights = rights;
    c.expiry = expiry;
    c.subject = std::move(subject);
    if (parent != capability::kNoCap) c.proof = {parent};
    entries_[c.id] = c;
    return c.id;
  }

  std::map<capability::CapId, Capability> entries_;
  capability::CapId next_ = 1;
  Tick now_ = 0;
};

}  // namespace

cas::ContentHash value_of(std::string_view tag) { return cas::sha256(to_bytes(tag)); }

InitialState draw_initial_state(const StateShape& shape, std::uint64_t seed) {
  InitialState init;
  init.shape = shape;
  bench::Rng rng(bench::derive_seed(seed, "initial-state"));
  init.graph = bench::gen_graph(shape.nodes, shape.ba_m, bench::derive_seed(seed, "graph"));
  for (const auto& [id, node] : init.graph.nodes()) {
    if (rng.chance(0.5)) init.graph.set_label(id, "b");
    else init.graph.set_label(id, "a");
    if (rng.chance(0.5)) init.merged.emplace_back(id, "v" + std::to_string(rng.below(4)));
  }
  for (std::size_t i = 0; i < shape.contents; ++i) init.payloads.push_back("blob-" + std::to_string(i));
  for (std::size_t i = 0; i < shape.grants; ++i) {
    GrantSpec g;
    g.parent = rng.below(i + 1);
    g.rights = capability::kAllRights[1 + rng.below(4)];
    g.ttl = 10'000;
    g.subject = "s" + std::to_string(i);
    init.grants.push_back(g);
  }
  return init;
}

std::unique_ptr<Adapter> make_engine_adapter(const InitialState& init) { return std::make_unique<EngineAdapter>(init); }
std::unique_ptr<Adapter> make_page_store(const InitialState& init) { return std::make_unique<PageStore>(init); }
std::unique_ptr<Adapter> make_merge_log(const InitialState& init) { return std::make_unique<MergeLog>(init); }
std::unique_ptr<Adapter> make_shared_graph(const InitialState& init) { return std::make_unique<SharedGraph>(init); }
std::unique_ptr<Adapter> make_content_store(const InitialState& init) { return std::make_unique<ContentStore>(init); }
std::unique_ptr<Adapter> make_location_store(const InitialState& init) {
  return std::make_unique<LocationStore>(init);
}
std::unique_ptr<Adapter> make_capability_adapter(const InitialState& init) {
  return std::make_unique<CapabilityAdapter>(init);
}
std::unique_ptr<Adapter> make_flat_acl(const InitialState& init) { return std::make_unique<FlatAcl>(init); }

}  // namespace tetra::commute
