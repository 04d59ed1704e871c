#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emob/graph.hpp"
#include "emob/mode.hpp"

namespace emob {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaVersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotEnoughReachablePairs : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class Topology { Grid, RandomGeometric };
enum class HubPlacement { UniformRandom, DegreeWeighted };

struct ScenarioSpec {
  std::string name = "scenario";
  int n_nodes = 25;
  Topology topology = Topology::Grid;
  int grid_cols = 0;               // 0 = near-square layout
  double target_avg_degree = 4.0;  // random-geometric only
  int k_hubs = 0;
  HubPlacement hub_placement = HubPlacement::UniformRandom;
  PerMode<Range> speed_ranges = {{{1.2, 1.6}, {4.0, 6.0}, {5.0, 8.0}, {6.0, 14.0}}};
  PerMode<Range> soc_ranges = {{{0.0, 0.0}, {200.0, 500.0}, {300.0, 700.0},
                                {20000.0, 60000.0}}};
  std::uint64_t seed = 0;

  void validate() const;  // throws InfeasibleSpec
};

struct Scenario {
  MultiModalGraph graph;
  HubRegistry hubs;
  std::string name;
  std::uint64_t seed = 0;
};

// Deterministic synthetic scenario. The undirected skeleton is connected and
// both arc directions are emitted; hubs stock all three vehicle modes. Hub
// sets are nested: the same spec with a larger k_hubs extends the smaller
// hub set, and a hub's SOC depends only on (seed, node), so hub-count sweeps
// compare like against like.
Scenario generate(const ScenarioSpec& spec);

struct ODSet {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::uint64_t seed = 0;
};

// n origin/destination pairs with walking distance >= min_walk_dist_m,
// sampled without replacement until the qualifying pairs are exhausted, then
// with replacement.
ODSet sample_od_pairs(const MultiModalGraph& g, int n, double min_walk_dist_m,
                      std::uint64_t seed);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// String-level versions backing the file round trip.
std::string scenario_to_string(const Scenario& s);
Scenario scenario_from_string(const std::string& text, const std::string& source);

}  // namespace emob
