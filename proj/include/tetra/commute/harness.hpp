#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tetra/bench/workload.hpp"
#include "tetra/commute/world.hpp"

namespace tetra::commute {

enum class PairVerdict { kCommute, kDiverge };

struct PairResult {
  PairVerdict verdict = PairVerdict::kCommute;
  // Exactly one of the two orders hit an error.
  bool order_dependent_legality = false;
  std::vector<Outcome> forward;   // outcomes of (e1, e2)
  std::vector<Outcome> backward;  // outcomes of (e2, e1)
  std::unique_ptr<World> after;   // state after e1 then e2
};

// Applies e1;e2 and e2;e1 to independent clones of `state`. Throws
// kIllegalFromState when neither order applies cleanly.
PairResult check_pair(const Event& e1, const Event& e2, const World& state);

// Random events of one projection's classes, drawn from what a state offers.
class EventGenerator {
 public:
  EventGenerator(Projection projection, std::uint64_t seed) : projection_(projection), rng_(seed) {}
  Event draw(const Universe& u);

 private:
  NodeId hot_node(const std::vector<NodeId>& nodes);

  Projection projection_;
  bench::Rng rng_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion (95% by default).
Interval wilson(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct MeasureParams {
  std::size_t horizon = 1000;  // pairs per repetition
  std::size_t reps = 30;
  std::uint64_t seed = 42;
  StateShape shape;
  // The evolving state is redrawn this often to keep histories short.
  std::size_t redraw_every = 100;
};

struct CommutationRow {
  Projection projection = Projection::kPi1;
  std::uint64_t trials = 0;
  std::uint64_t nc_count = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::string config;
  std::uint64_t order_dependent = 0;
  // Draws discarded because neither order was applicable.
  std::uint64_t illegal_draws = 0;

  bool non_commuting() const { return ci_lo > 0.0; }
};

CommutationRow measure(Projection projection, const MeasureParams& params, const Config& config);

struct Theorem1Summary {
  std::vector<CommutationRow> baseline;
  std::vector<CommutationRow> composed;
  std::vector<Projection> baseline_nc;  // CI excludes 0
  std::vector<Projection> composed_nc;
  // Baseline projections the composition turns commutative.
  std::vector<Projection> resolved;
  // Composed set is exactly {pi5} and at least four baseline projections fail.
  bool holds = false;
  std::string report() const;
};

Theorem1Summary theorem1_suite(const MeasureParams& params);

// `projection,trials,nc_count,rate,ci_lo,ci_hi,config`
std::string commutation_csv(std::span<const CommutationRow> rows);
// `projection,config,rate`
std::string heatmap_csv(std::span<const CommutationRow> rows);

// Brute-force cross-check on a tiny state: every ordered pair from a fixed
// event set, classified once through check_pair and once by comparing full
// plain-text renderings of the two end states.
enum class Classification { kCommute, kDiverge, kIllegal };

struct OracleReport {
  std::size_t pairs = 0;
  std::size_t agreements = 0;
  std::size_t illegal = 0;
  std::size_t diverging = 0;
  std::vector<std::string> disagreements;
};

StateShape small_shape();
// Tiny world with one client read lease already held.
std::unique_ptr<World> small_world(const Config& config, std::uint64_t seed);
std::vector<Event> small_event_set(const World& world);
Classification classify(const Event& e1, const Event& e2, const World& state);
Classification oracle_classify(const Event& e1, const Event& e2, const World& state);
OracleReport exhaustive_oracle(const Config& config, std::uint64_t seed);

}  // namespace tetra::commute
