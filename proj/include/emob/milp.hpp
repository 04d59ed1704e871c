#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "emob/cost.hpp"
#include "emob/graph.hpp"
#include "emob/itinerary.hpp"
#include "emob/lp.hpp"

namespace emob {

class UnreachableDestination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The selected arcs do not form one origin-to-destination chain. Cannot
// happen at an optimum with positive ride costs; checked defensively.
class DisconnectedSelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using XKey = std::tuple<NodeId, NodeId, Mode>;   // ride arc (i, j) in mode s
using YKey = std::tuple<NodeId, Mode, Mode>;     // switch s -> s' at node v
using EKey = std::pair<NodeId, Mode>;            // charge level entering v

struct VariableIndex {
  std::map<XKey, int> x_vars;
  std::map<YKey, int> y_vars;
  std::map<EKey, int> e_vars;
};

struct MilpModel {
  lp::LinearModel model;
  VariableIndex index;
  // Metres behind each ride column; prices energy without the source graph.
  std::map<XKey, double> ride_distance_m;
};

// One candidate ride presented to the model builder. cost_s is the finished
// objective coefficient (preference factors already applied); distance_m
// drives the charge accounting.
struct RideOption {
  NodeId from = 0;
  NodeId to = 0;
  Mode mode = Mode::Walk;
  double cost_s = 0.0;
  double distance_m = 0.0;
};

// Flow MILP over (node, mode) states: per-arc mode exclusivity, per-state
// flow balance with switch coupling, a global switch budget, and big-M
// charge-propagation rows. The destination absorbs the unit in Walk or in
// any vehicle mode its hub can dock.
MilpModel build_model(const MultiModalGraph& g, const HubRegistry& hubs,
                      const Query& q);

// Core builder behind build_model. Callers that collapse the network hand in
// their own ride options; (from, to) pairs listed under several modes share
// one exclusivity row, exactly like a multi-mode arc.
MilpModel build_model_from_rides(int num_nodes, const std::vector<RideOption>& rides,
                                 const HubRegistry& hubs, const Query& q);

enum class MilpStatus { Optimal, Infeasible, NodeLimit, TimeLimit };

struct MilpLimits {
  long max_bb_nodes = 1000000;
  long time_ms = 0;  // 0 = no limit
};

struct MilpStats {
  long bb_nodes = 0;
  long lp_iterations = 0;
  double wall_ms = 0.0;
};

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = 0.0;  // valid when an incumbent exists
  bool has_incumbent = false;
  std::vector<XKey> x_assignment;
  std::vector<YKey> y_assignment;
  MilpStats stats;
};

// Best-first branch and bound over the simplex relaxation. Branches on the
// most fractional binary, ties to the lowest column; a node is pruned when
// its bound >= incumbent - 1e-9 * |incumbent|.
MilpResult solve(const MilpModel& mm, const MilpLimits& limits = {});

// Rebuilds the ordered leg sequence from the selected arcs and switches,
// priced from the model columns. Zero-fee switch pairs that cancel out are
// tolerated; unused selected arcs raise DisconnectedSelection.
Itinerary extract_itinerary(const MilpResult& result, const MilpModel& mm,
                            const Query& q);

}  // namespace emob
