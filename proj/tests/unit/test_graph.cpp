#include <gtest/gtest.h>

#include <queue>
#include <random>
#include <sstream>

#include "tetra/bench/workload.hpp"
#include "tetra/graph/editor.hpp"

using namespace tetra;
using namespace tetra::graph;
using capability::Region;
using capability::Rights;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

struct Fixture {
  capability::CapabilityTable caps;
  capability::Capability root = caps.mint_root(Region::all(), Rights::kAdmin);
  ownership::LeaseTable leases;
  ownership::WriteLease lease = leases.create(0);

  AccessContext ctx(const capability::Capability& cap) const { return AccessContext{&caps, cap.id, 0, {}}; }
  AccessContext ctx() const { return ctx(root); }
};

// Independent oracle: plain BFS over the adjacency map, ignoring capabilities.
std::set<NodeId> bfs(const Graph& g, NodeId start, unsigned k) {
  std::map<NodeId, unsigned> dist{{start, 0}};
  std::queue<NodeId> q;
  q.push(start);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    if (dist[v] == k) continue;
    for (const auto& [w, _] : g.node(v).out) {
      if (dist.emplace(w, dist[v] + 1).second) q.push(w);
    }
  }
  std::set<NodeId> out;
  for (const auto& [v, _] : dist) out.insert(v);
  return out;
}

std::set<NodeId> as_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

Graph random_graph(std::mt19937_64& rng, std::size_t n) {
  Graph g;
  for (NodeId i = 0; i < n; ++i) g.add_node(i, rng() % 2 ? "a" : "b");
  for (std::size_t e = 0; e < 2 * n; ++e) {
    const NodeId s = rng() % n, d = rng() % n;
    if (!g.has_edge(Edge{s, d, "e"})) g.add_edge(s, d, "e");
  }
  return g;
}

}  // namespace

TEST(Editor, SchemaAndCapabilityGates) {
  Fixture f;
  Graph base;
  base.add_node(0, "person");
  base.add_node(1, "doc");
  LabelSchema schema;
  schema.allow("person", "wrote", "doc");
  Editor editor(base, f.ctx(), f.leases, {f.lease}, {}, &schema);
  editor.add_edge(0, 1, "wrote");
  EXPECT_EQ(code_of([&] { editor.add_edge(1, 0, "wrote"); }), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([&] { editor.add_edge(0, 9, "wrote"); }), ErrorCode::kUnknownNode);
  EXPECT_TRUE(schema.conforms(editor.staged()));
  EXPECT_EQ(editor.observation().ops().size(), 1u);

  const auto reader = f.caps.grant(f.root, Region::all(), Rights::kRead, 100);
  Editor ro(base, f.ctx(reader), f.leases, {f.lease}, {}, &schema);
  EXPECT_EQ(code_of([&] { ro.add_edge(0, 1, "wrote"); }), ErrorCode::kCapabilityRejected);

  f.leases.release(f.lease);
  Editor stale(base, f.ctx(), f.leases, {f.lease});
  EXPECT_EQ(code_of([&] { stale.add_node("x"); }), ErrorCode::kStaleLease);
}

TEST(Traverse, ZeroHopsAndPath) {
  Fixture f;
  Graph g;
  for (NodeId i = 0; i < 5; ++i) g.add_node(i, "n");
  for (NodeId i = 0; i + 1 < 5; ++i) g.add_edge(i, i + 1, "next");
  EXPECT_EQ(traverse_khop(g, 2, 0, f.ctx()), std::vector<NodeId>{2});
  EXPECT_EQ(traverse_khop(g, 0, 3, f.ctx()), (std::vector<NodeId>{0, 1, 2, 3}));
  EXPECT_EQ(code_of([&] { traverse_khop(g, 42, 1, f.ctx()); }), ErrorCode::kUnknownNode);
  const auto reader = f.caps.grant(f.root, Region::all(), Rights::kRead, 100);
  EXPECT_EQ(code_of([&] { traverse_khop(g, 0, 1, f.ctx(reader)); }), ErrorCode::kCapabilityRejected);
}

TEST(Traverse, MatchesBfsOnPreferentialAttachment) {
  Fixture f;
  const auto g = bench::gen_graph(500, 3, 17);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const NodeId start = rng() % 500;
    for (unsigned k : {1u, 2u, 3u}) {
      EXPECT_EQ(as_set(traverse_khop(g, start, k, f.ctx())), bfs(g, start, k)) << start << " k=" << k;
    }
  }
}

TEST(Traverse, PureAndConfined) {
  Fixture f;
  const auto g = bench::gen_graph(300, 2, 5);
  const auto before = g.state_hash();
  const auto region = Region::range(0, 150);
  const auto scoped = f.caps.grant(f.root, region, Rights::kTraverse, 1000);
  std::size_t returned = 0;
  for (NodeId s = 0; s < 150; ++s) {
    const auto out = traverse_khop(g, s, 3, f.ctx(scoped));
    returned += out.size();
    for (auto v : out) EXPECT_TRUE(region.contains(v));
    // Confinement means BFS on the induced subgraph.
    EXPECT_EQ(as_set(out), bfs(g.restrict(region), s, 3));
  }
  EXPECT_GT(returned, 150u);
  EXPECT_EQ(g.state_hash(), before);
}

TEST(Traverse, DegreeBound) {
  Fixture f;
  Graph star;
  star.add_node(0, "hub");
  for (NodeId i = 1; i <= 20; ++i) {
    star.add_node(i, "leaf");
    star.add_edge(0, i, "spoke");
  }
  auto ctx = f.ctx();
  ctx.options.degree_bound = 10;
  EXPECT_EQ(code_of([&] { traverse_khop(star, 0, 1, ctx); }), ErrorCode::kDegreeBoundExceeded);
  ctx.options.degree_bound = 20;
  EXPECT_EQ(traverse_khop(star, 0, 1, ctx).size(), 21u);
}

TEST(Query, CompositionLaws) {
  Fixture f;
  std::mt19937_64 rng(8);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_graph(rng, 20);
    const std::vector<Query> pieces{Query::khop(1), Query::khop(2), Query::label_filter("a"), Query::identity()};
    const auto& q1 = pieces[rng() % 4];
    const auto& q2 = pieces[rng() % 4];
    const auto& q3 = pieces[rng() % 4];
    for (NodeId s = 0; s < 20; ++s) {
      const std::vector<NodeId> in{s};
      EXPECT_EQ(compose(Query::khop(1), Query::khop(2)).evaluate(g, in, f.ctx()),
                Query::khop(3).evaluate(g, in, f.ctx()));
      EXPECT_EQ(as_set(Query::khop(3).evaluate(g, in, f.ctx())), bfs(g, s, 3));
      EXPECT_EQ(compose(q1, Query::identity()).evaluate(g, in, f.ctx()), q1.evaluate(g, in, f.ctx()));
      EXPECT_EQ(compose(compose(q1, q2), q3).evaluate(g, in, f.ctx()),
                compose(q1, compose(q2, q3)).evaluate(g, in, f.ctx()));
    }
  }
}

TEST(Query, TypeMismatch) {
  const auto docs = Query::label_filter("doc");
  const auto wants_person = Query::khop(1).expecting("person");
  EXPECT_EQ(code_of([&] { compose(docs, wants_person); }), ErrorCode::kTypeMismatch);
  EXPECT_EQ(compose(Query::label_filter("person"), wants_person).input_type(), std::nullopt);
  EXPECT_EQ(compose(docs, Query::identity()).output_type(), "doc");
}

TEST(EdgeList, RoundTrip) {
  const auto g = bench::gen_graph(60, 2, 3);
  std::stringstream edges, labels;
  write_edge_list(g, edges, labels);
  const auto first_line = edges.str().substr(0, edges.str().find('\n'));
  EXPECT_EQ(std::count(first_line.begin(), first_line.end(), ' '), 2);
  EXPECT_EQ(read_edge_list(edges, labels), g);
}
