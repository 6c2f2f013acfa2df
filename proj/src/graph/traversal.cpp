#include "tetra/graph/traversal.hpp"

#include <algorithm>
#include <unordered_set>

namespace tetra::graph {

std::vector<NodeId> traverse_khop(const Graph& graph, std::span<const NodeId> starts, unsigned k,
                                  const AccessContext& ctx, TraversalStats* stats) {
  if (graph.max_out_degree() > ctx.options.degree_bound) {
    throw Error(ErrorCode::kDegreeBoundExceeded, "max out-degree " + std::to_string(graph.max_out_degree()),
                graph.max_out_degree());
  }
  std::optional<capability::Region> region;
  if (ctx.options.enforce_capability) {
    if (!ctx.capabilities) throw Error(ErrorCode::kCapabilityRejected, "no capability table");
    for (auto start : starts) {
      auto verdict = ctx.capabilities->verify(ctx.cap, capability::Region::point(start), capability::Rights::kTraverse,
                                              ctx.now);
      if (!verdict) throw Error(ErrorCode::kCapabilityRejected, std::string(to_string(verdict.reason)));
    }
    region = ctx.capabilities->find(ctx.cap)->region;
  }
  for (auto start : starts) {
    if (!graph.has_node(start)) throw Error(ErrorCode::kUnknownNode, std::to_string(start));
  }

  std::unordered_set<NodeId> seen(starts.begin(), starts.end());
  std::vector<NodeId> frontier(seen.begin(), seen.end());
  std::vector<NodeId> next;
  std::vector<NodeId> scratch;
  if (stats) stats->frontier_sizes.push_back(frontier.size());
  for (unsigned hop = 0; hop < k && !frontier.empty(); ++hop) {
    next.clear();
    for (auto id : frontier) {
      scratch.clear();
      graph.neighbors(id, scratch);
      if (stats) stats->edges_scanned += scratch.size();
      for (auto n : scratch) {
        if (region && !region->contains(n)) continue;
        if (seen.insert(n).second) next.push_back(n);
      }
    }
    if (stats) stats->frontier_sizes.push_back(next.size());
    frontier.swap(next);
  }
  std::vector<NodeId> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> traverse_khop(const Graph& graph, NodeId start, unsigned k, const AccessContext& ctx,
                                  TraversalStats* stats) {
  return traverse_khop(graph, std::span<const NodeId>(&start, 1), k, ctx, stats);
}

Query Query::identity() { return Query{}; }

Query Query::khop(unsigned k) {
  Query q;
  q.steps_.push_back(Step{Step::Kind::kHop, k, {}});
  return q;
}

Query Query::label_filter(Label label) {
  Query q;
  q.steps_.push_back(Step{Step::Kind::kLabel, 0, label});
  q.output_ = std::move(label);
  return q;
}

Query Query::expecting(Label label) const {
  Query q = *this;
  q.input_ = std::move(label);
  if (q.steps_.empty()) q.output_ = q.input_;
  return q;
}

Query compose(const Query& first, const Query& second) {
  if (second.input_ && first.output_ != second.input_) {
    throw Error(ErrorCode::kTypeMismatch,
                "expects " + *second.input_ + " but receives " + first.output_.value_or("<any>"));
  }
  Query q;
  q.steps_ = first.steps_;
  q.steps_.insert(q.steps_.end(), second.steps_.begin(), second.steps_.end());
  q.input_ = first.input_;
  q.output_ = second.steps_.empty() ? first.output_ : second.output_;
  // A hop after a label filter forgets the type.
  if (!second.steps_.empty() && second.steps_.back().kind == Query::Step::Kind::kHop) q.output_.reset();
  return q;
}

std::vector<NodeId> Query::evaluate(const Graph& graph, std::span<const NodeId> inputs,
                                    const AccessContext& ctx) const {
  std::vector<NodeId> current(inputs.begin(), inputs.end());
  std::sort(current.begin(), current.end());
  current.erase(std::unique(current.begin(), current.end()), current.end());
  for (const auto& step : steps_) {
    if (current.empty()) break;
    if (step.kind == Step::Kind::kHop) {
      // Hop expansion distributes over union, so expanding the whole set at
      // once equals applying it per input and deduplicating.
      current = traverse_khop(graph, current, step.k, ctx);
    } else {
      std::erase_if(current, [&](NodeId id) { return graph.node(id).label != step.label; });
    }
  }
  return current;
}

}  // namespace tetra::graph
