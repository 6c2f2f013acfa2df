#include "tetra/bench/workload.hpp"

#include <algorithm>
#include <cmath>

namespace tetra::bench {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return splitmix(splitmix(root ^ h) + index);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidParams, "empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

ZipfSampler::ZipfSampler(double alpha, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidParams, "zipf support must be non-empty");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::kInvalidParams, "zipf exponent must be non-negative");
  cdf_.resize(n);
  double total = 0.0;
  for (std::size_t r = 1; r <= n; ++r) {
    total += std::pow(static_cast<double>(r), -alpha);
    cdf_[r - 1] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t ZipfSampler::sample(Rng& rng) const {
  const auto u = rng.uniform();
  return static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) + 1;
}

double ZipfSampler::probability(std::size_t rank) const {
  if (rank == 0 || rank > cdf_.size()) return 0.0;
  return cdf_[rank - 1] - (rank > 1 ? cdf_[rank - 2] : 0.0);
}

graph::Graph gen_graph(std::size_t n, std::size_t m, std::uint64_t seed, std::string_view label) {
  if (m < 1 || n <= m) throw Error(ErrorCode::kInvalidParams, "need n > m >= 1");
  Rng rng(seed);
  graph::Graph g;
  const graph::Label name(label);
  // One entry per edge endpoint, so a uniform pick is degree-proportional.
  std::vector<NodeId> endpoints;
  auto link = [&](NodeId a, NodeId b) {
    g.add_edge(a, b, "link");
    g.add_edge(b, a, "link");
    endpoints.push_back(a);
    endpoints.push_back(b);
  };
  for (NodeId v = 0; v <= m; ++v) g.add_node(v, name);
  for (NodeId a = 0; a <= m; ++a) {
    for (NodeId b = a + 1; b <= m; ++b) link(a, b);
  }
  std::vector<NodeId> targets;
  for (NodeId v = m + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      const auto t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    g.add_node(v, name);
    for (auto t : targets) link(v, t);
  }
  return g;
}

std::vector<std::size_t> degrees(const graph::Graph& g) {
  std::vector<std::size_t> out;
  out.reserve(g.node_count());
  for (const auto& [id, node] : g.nodes()) out.push_back(node.out.size());
  return out;
}

}  // namespace tetra::bench
