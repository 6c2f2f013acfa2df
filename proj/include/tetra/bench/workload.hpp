#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "tetra/graph/graph.hpp"

namespace tetra::bench {

// Seed of a named sub-stream of `root` (workload, events, bootstrap, ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

// Deterministic generator with portable bounded draws; the standard
// distributions are implementation-defined, so they are avoided here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1).
  double uniform();
  bool chance(double p) { return uniform() < p; }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

// Ranks 1..N with P(r) proportional to r^-alpha.
class ZipfSampler {
 public:
  ZipfSampler(double alpha, std::size_t n);

  std::size_t sample(Rng& rng) const;
  double probability(std::size_t rank) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

// Preferential attachment: an (m+1)-clique, then each new node links to m
// distinct existing nodes picked with probability proportional to degree.
// Every undirected edge is stored in both directions with type "link".
graph::Graph gen_graph(std::size_t n, std::size_t m, std::uint64_t seed, std::string_view label = "node");

// Undirected degree per node (out-degree, since edges are mirrored).
std::vector<std::size_t> degrees(const graph::Graph& g);

}  // namespace tetra::bench
