#pragma once

#include <memory>

#include "tetra/commute/world.hpp"
#include "tetra/graph/graph.hpp"

namespace tetra::commute {

struct GrantSpec {
  std::size_t parent = 0;  // index into previously created caps, 0 = root
  capability::Rights rights = capability::Rights::kRead;
  Tick ttl = 0;
  std::string subject;
};

// The random starting point every adapter is built from.
struct InitialState {
  StateShape shape;
  graph::Graph graph;
  std::vector<std::pair<NodeId, std::string>> merged;  // initial value writes
  std::vector<std::string> payloads;
  std::vector<GrantSpec> grants;
};

InitialState draw_initial_state(const StateShape& shape, std::uint64_t seed);

cas::ContentHash value_of(std::string_view tag);

// Full composition: snapshots, owner leases, canonical windows.
std::unique_ptr<Adapter> make_engine_adapter(const InitialState& init);
// Reference backends.
std::unique_ptr<Adapter> make_page_store(const InitialState& init);
std::unique_ptr<Adapter> make_merge_log(const InitialState& init);
std::unique_ptr<Adapter> make_shared_graph(const InitialState& init);
std::unique_ptr<Adapter> make_content_store(const InitialState& init);
std::unique_ptr<Adapter> make_location_store(const InitialState& init);
std::unique_ptr<Adapter> make_capability_adapter(const InitialState& init);
std::unique_ptr<Adapter> make_flat_acl(const InitialState& init);

}  // namespace tetra::commute
