#include <gtest/gtest.h>

#include <random>

#include "tetra/bench/workload.hpp"
#include "tetra/cas/pack.hpp"
#include "tetra/core/engine.hpp"

using namespace tetra;
using namespace tetra::core;
using graph::Graph;
using graph::Observation;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

// A random legal observation over `base`, at most `max_nodes` node ids.
Observation random_observation(std::mt19937_64& rng, const Graph& base, std::size_t max_nodes, int ops) {
  Graph scratch = base;
  Observation obs;
  for (int i = 0; i < ops; ++i) {
    const NodeId a = rng() % max_nodes, b = rng() % max_nodes;
    const std::string label = rng() % 2 ? "p" : "q";
    graph::Mutation m;
    switch (rng() % 5) {
      case 0:
        if (scratch.has_node(a)) continue;
        m = graph::AddNode{a, label};
        break;
      case 1:
        if (!scratch.has_node(a)) continue;
        m = graph::RemoveNode{a};
        break;
      case 2:
        if (!scratch.has_node(a)) continue;
        m = graph::SetLabel{a, label};
        break;
      case 3:
        if (!scratch.has_node(a) || !scratch.has_node(b) || scratch.has_edge({a, b, "e"})) continue;
        m = graph::AddEdge{{a, b, "e"}};
        break;
      default:
        if (!scratch.has_node(a)) continue;
        m = graph::SetValue{a, cas::sha256(to_bytes(std::to_string(rng() % 7)))};
    }
    Observation({m}).apply(scratch);
    obs.push(m);
  }
  return obs;
}

// Segment holding each hash, found by parsing every segment; later copies win.
std::set<std::size_t> scan_segments(const cas::PackStore& store, const std::vector<cas::ContentHash>& hashes) {
  std::map<cas::ContentHash, std::size_t> where;
  for (std::size_t s = 0; s < store.segment_count(); ++s) {
    const auto pack = cas::Pack::parse(store.segment_bytes(s));
    for (const auto& e : pack.entries()) where[e.hash] = s;
  }
  std::set<std::size_t> out;
  for (const auto& h : hashes) out.insert(where.at(h));
  return out;
}

std::vector<cas::ContentHash> all_fragments(const Snapshot& s) {
  std::vector<cas::ContentHash> out;
  for (const auto& [_, e] : s.root) out.insert(out.end(), e.fragments.begin(), e.fragments.end());
  return out;
}

}  // namespace

TEST(Commit, EmptyAndSingleEntry) {
  cas::PackStore store;
  Lineage lineage(store);
  const auto g = bench::gen_graph(20, 2, 1);
  const auto s1 = lineage.commit(observation_from(g), 1);
  const auto s2 = lineage.commit(Observation{}, 2);
  EXPECT_EQ(s2->root, s1->root);
  EXPECT_EQ(s2->tick, 2u);
  EXPECT_EQ(s2->parent, s1->hash);
  const auto s3 = lineage.commit(Observation({graph::SetLabel{7, "changed"}}), 3);
  std::size_t differing = 0;
  for (const auto& [id, e] : s3->root) differing += !(e.content == s2->root.at(id).content);
  EXPECT_EQ(differing, 1u);
  EXPECT_EQ(code_of([&] { lineage.commit(Observation{}, 3); }), ErrorCode::kNonMonotoneTick);
  EXPECT_EQ(lineage.head()->hash, s3->hash);
}

TEST(Commit, FunctorPreservesComposition) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const auto obs1 = random_observation(rng, Graph{}, 10, 12);
    Graph mid;
    obs1.apply(mid);
    const auto obs2 = random_observation(rng, mid, 10, 12);
    cas::PackStore sa, sb;
    Lineage a(sa), b(sb);
    const auto composed = a.commit(obs1.then(obs2), 1);
    b.commit(obs1, 1);
    const auto stepwise = b.commit(obs2, 2);
    EXPECT_TRUE(obs_equiv(*composed, *stepwise));
  }
}

TEST(View, RoundTripAndImmutability) {
  cas::PackStore store;
  Lineage lineage(store);
  const auto g = bench::gen_graph(100, 3, 2);
  const auto s1 = lineage.commit(observation_from(g), 1);
  EXPECT_EQ(lineage.view(*s1), g);
  lineage.commit(Observation({graph::RemoveNode{4}, graph::AddNode{500, "new"}}), 2);
  EXPECT_EQ(lineage.view(*s1), g);
  EXPECT_NE(lineage.view(*lineage.head()), g);
  EXPECT_EQ(lineage.view(*lineage.head()), lineage.head_view());

  cas::PackStore empty;
  Lineage other(empty);
  EXPECT_EQ(code_of([&] { other.view(*s1); }), ErrorCode::kMissingContent);
}

TEST(ObsEquiv, EquivalenceRelation) {
  std::mt19937_64 rng(6);
  std::vector<std::shared_ptr<const Snapshot>> snaps;
  cas::PackStore store;
  for (int i = 0; i < 12; ++i) {
    Lineage l(store);
    snaps.push_back(l.commit(random_observation(rng, Graph{}, 3, 4), 1 + i % 2));
  }
  for (const auto& a : snaps) {
    EXPECT_TRUE(obs_equiv(*a, *a));
    for (const auto& b : snaps) {
      EXPECT_EQ(obs_equiv(*a, *b), obs_equiv(*b, *a));
      EXPECT_EQ(obs_equiv(*a, *b), invariants(*a) == invariants(*b));
      for (const auto& c : snaps) {
        if (obs_equiv(*a, *b) && obs_equiv(*b, *c)) EXPECT_TRUE(obs_equiv(*a, *c));
      }
    }
  }
  auto tweaked = *snaps.front();
  tweaked.root.begin()->second.content = cas::sha256(to_bytes("other"));
  if (!snaps.front()->root.empty()) EXPECT_FALSE(obs_equiv(*snaps.front(), tweaked));
}

TEST(Lineage, HundredCommitsAcceptAndReplay) {
  cas::PackStore store;
  Lineage lineage(store);
  std::mt19937_64 rng(3);
  for (Tick t = 1; t <= 100; ++t) lineage.commit(random_observation(rng, lineage.head_view(), 30, 5), t);
  const auto verdict = lineage.check();
  EXPECT_TRUE(verdict.accepted) << verdict.reason;
  EXPECT_EQ(verdict.replay_diff, 0u);
  EXPECT_EQ(verdict.length, 101u);
  EXPECT_EQ(lineage.rows().size(), 101u);
  EXPECT_TRUE(lineage.lineage_csv().starts_with("tick,snapshot_hash,parent_hash,fragment_count\n0,"));
}

TEST(Lineage, TamperedLinkRejectedAtThatLink) {
  cas::PackStore store;
  Lineage lineage(store);
  std::mt19937_64 rng(4);
  for (Tick t = 1; t <= 20; ++t) lineage.commit(random_observation(rng, lineage.head_view(), 15, 4), t);
  std::vector<cas::ContentHash> chain;
  for (auto it = lineage.rows().rbegin(); it != lineage.rows().rend(); ++it) chain.push_back(it->hash);
  for (std::size_t victim : {0u, 5u, 13u}) {
    const auto target = chain[victim];
    const auto verdict = lineage_check(
        chain.front(),
        [&](const cas::ContentHash& h) {
          auto bytes = store.get(h);
          // Flip one byte inside the root entries.
          if (h == target) bytes[bytes.size() - 40] ^= std::byte{1};
          return bytes;
        },
        store);
    EXPECT_FALSE(verdict.accepted);
    EXPECT_EQ(verdict.link, victim);
    EXPECT_EQ(verdict.at, target);
  }
}

TEST(Compaction, BoundedFragmentsAndEquivalence) {
  for (std::size_t k : {1u, 2u, 4u}) {
    cas::StoreOptions opts;
    opts.segment_bytes = 2048;
    cas::PackStore store(opts);
    LineageOptions lopts;
    lopts.max_chain = 3;
    Lineage lineage(store, lopts);
    std::mt19937_64 rng(k);
    lineage.commit(observation_from(bench::gen_graph(200, 2, k)), 1);
    for (Tick t = 2; t < 30; ++t) lineage.commit(random_observation(rng, lineage.head_view(), 200, 20), t);
    const auto before = lineage.head();
    const auto before_view = lineage.view(*before);
    EXPECT_GT(scan_segments(store, all_fragments(*before)).size(), k);

    const auto compacted = lineage.compact(*before, k);
    EXPECT_TRUE(obs_equiv(*before, *compacted));
    EXPECT_EQ(lineage.view(*compacted), before_view);
    EXPECT_GT(lineage.last_compaction_bytes(), 0u);
    EXPECT_LE(scan_segments(store, all_fragments(*compacted)).size(), k);
    EXPECT_LE(compacted->fragment_count, k);
    EXPECT_TRUE(lineage.check().accepted);

    const auto again = lineage.compact(*compacted, k);
    EXPECT_EQ(lineage.last_compaction_bytes(), 0u);
    EXPECT_EQ(again->hash, compacted->hash);
  }
  cas::PackStore store;
  Lineage lineage(store);
  EXPECT_EQ(code_of([&] { lineage.compact(*lineage.head(), 0); }), ErrorCode::kInvalidParams);
}

TEST(Compaction, ScheduleInsensitive) {
  std::mt19937_64 rng(12);
  std::vector<Observation> batches;
  Graph g;
  for (int i = 0; i < 25; ++i) {
    batches.push_back(random_observation(rng, g, 40, 10));
    batches.back().apply(g);
  }
  auto run = [&](std::set<int> compact_after, std::size_t k) {
    cas::PackStore store;
    Lineage lineage(store);
    for (int i = 0; i < 25; ++i) {
      lineage.commit(batches[i], i + 1);
      if (compact_after.contains(i)) lineage.compact(*lineage.head(), k);
    }
    return lineage.head();
  };
  const auto never = run({}, 1);
  EXPECT_TRUE(obs_equiv(*never, *run({3, 9, 24}, 1)));
  EXPECT_TRUE(obs_equiv(*never, *run({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 2)));
  EXPECT_TRUE(obs_equiv(*never, *run({24}, 4)));
}

TEST(Naturality, RestrictCommutesWithCommit) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = bench::gen_graph(80, 2, seed);
    const auto region = capability::Region::range(seed * 3, 40 + seed * 3);
    cas::PackStore sa, sb;
    Lineage a(sa), b(sb);
    const auto committed = a.commit(observation_from(g), 1);
    const auto restricted_after = restrict(*committed, region, sa);
    const auto restricted_first = b.commit(observation_from(g.restrict(region)), 1);
    EXPECT_TRUE(obs_equiv(restricted_after, *restricted_first));
    EXPECT_EQ(a.view(restricted_after), b.view(*restricted_first));
  }
}

TEST(ReadPath, DepthBoundedByFragmentBound) {
  for (std::size_t k : {1u, 2u, 4u}) {
    cas::PackStore store;
    LineageOptions opts;
    opts.max_chain = k;
    opts.cache_capacity = 8;
    Lineage lineage(store, opts);
    lineage.commit(observation_from(bench::gen_graph(50, 2, 9)), 1);
    std::mt19937_64 rng(k);
    std::uint32_t deepest = 0;
    for (Tick t = 2; t < 60; ++t) {
      lineage.commit(Observation({graph::SetLabel{rng() % 50, std::to_string(t)}}), t);
      for (NodeId id = 0; id < 50; ++id) {
        AccessRecord rec;
        const auto node = lineage.read_node(*lineage.head(), id, &rec);
        EXPECT_EQ(node->label, lineage.head_view().node(id).label);
        EXPECT_LE(rec.depth, k);
        if (!rec.hit) EXPECT_EQ(rec.steps, 1 + rec.depth);
        deepest = std::max(deepest, rec.depth);
      }
    }
    EXPECT_EQ(deepest, k);
  }
}

TEST(Engine, SessionHoldsLeasesUntilCommit) {
  Engine engine;
  const auto root = engine.capabilities().mint_root(capability::Region::all(), capability::Rights::kAdmin);
  {
    auto session = engine.open(root.id, {0}, 1);
    const auto id = session.editor().add_node("x");
    session.editor().set_value(id, engine.store().put(to_bytes("payload")));
    EXPECT_TRUE(engine.leases().state(0).writer);
    EXPECT_EQ(code_of([&] { engine.open(root.id, {0}, 1); }), ErrorCode::kWriterActive);
    const auto snap = session.commit(2);
    EXPECT_EQ(snap->root.size(), 1u);
    EXPECT_FALSE(engine.leases().state(0).writer);
    EXPECT_EQ(engine.leases().state(0).version, 1u);
  }
  const auto reader = engine.capabilities().grant(root, capability::Region::all(), capability::Rights::kRead, 100);
  auto session = engine.open(reader.id, {0}, 3);
  EXPECT_EQ(code_of([&] { session.editor().add_node("y"); }), ErrorCode::kCapabilityRejected);
}
