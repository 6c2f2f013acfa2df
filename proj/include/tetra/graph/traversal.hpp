#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tetra/capability/capability_table.hpp"
#include "tetra/graph/graph.hpp"

namespace tetra::graph {

struct TraversalOptions {
  // Graphs whose max out-degree exceeds this are refused (bounded-degree assumption).
  std::size_t degree_bound = 10'000;
  // Off only for the overhead baseline: no verify, no region confinement.
  bool enforce_capability = true;
};

// Who is asking, and when.
struct AccessContext {
  const capability::CapabilityTable* capabilities = nullptr;
  capability::CapId cap = capability::kNoCap;
  Tick now = 0;
  TraversalOptions options;
};

struct TraversalStats {
  // Number of newly discovered nodes per hop, hop 0 being the start set.
  std::vector<std::size_t> frontier_sizes;
  std::size_t edges_scanned = 0;
};

// All nodes reachable from `start` in at most `k` hops without leaving the
// capability's region, ascending by id. Requires traverse rights on `start`.
std::vector<NodeId> traverse_khop(const Graph& graph, NodeId start, unsigned k, const AccessContext& ctx,
                                  TraversalStats* stats = nullptr);

// Same, from several starts at once; the result is the union.
std::vector<NodeId> traverse_khop(const Graph& graph, std::span<const NodeId> starts, unsigned k,
                                  const AccessContext& ctx, TraversalStats* stats = nullptr);

// A composable read-only query: a pipeline of k-hop expansions and label filters.
class Query {
 public:
  static Query identity();
  static Query khop(unsigned k);
  static Query label_filter(Label label);

  // Declares the node type this query accepts; composition checks it.
  Query expecting(Label label) const;

  const std::optional<Label>& input_type() const { return input_; }
  const std::optional<Label>& output_type() const { return output_; }

  std::vector<NodeId> evaluate(const Graph& graph, std::span<const NodeId> inputs, const AccessContext& ctx) const;

  // `second` applied to each output of `first`. Throws kTypeMismatch when
  // `second` expects a node type `first` does not produce.
  friend Query compose(const Query& first, const Query& second);

 private:
  struct Step {
    enum class Kind { kHop, kLabel } kind;
    unsigned k = 0;
    Label label;
  };

  std::vector<Step> steps_;
  std::optional<Label> input_;
  std::optional<Label> output_;
};

}  // namespace tetra::graph
