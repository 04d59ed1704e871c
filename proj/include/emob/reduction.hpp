#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "emob/cost.hpp"
#include "emob/graph.hpp"
#include "emob/itinerary.hpp"
#include "emob/milp.hpp"

namespace emob {

// Neither any hub nor the destination can be reached on foot from the
// origin, or the destination is walled off from every hub and the origin.
class NoWalkPathToAnyHub : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingExpansion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Directed hub-level arc. Time carries the preference weighting like every
// other routing cost; distance is the metres of the recorded underlying path
// (the time-shortest one, which need not be the metre-shortest).
struct SuperEdge {
  NodeId from = 0;
  NodeId to = 0;
  Mode mode = Mode::Walk;
  double cumulative_time_s = 0.0;
  double cumulative_distance_m = 0.0;
};

// Hub-collapsed network: node 0 is the origin, node 1 the destination, the
// hubs follow in ascending original id. A hub sitting on the origin or the
// destination folds into node 0 or 1, shrinking the node count below k + 2.
struct ReducedGraph {
  std::vector<NodeId> original;  // reduced id -> original node id
  std::vector<double> xs, ys;    // original coordinates, aligned with `original`
  HubRegistry hubs;              // re-registered under reduced ids
  std::vector<SuperEdge> super_edges;  // unique (from, to, mode), sorted
  NodeId origin = 0;
  NodeId destination = 1;

  int num_nodes() const { return static_cast<int>(original.size()); }
};

// Everything needed to restore full resolution without the source graph:
// per super-edge the priced original legs, plus the node translation.
struct ExpansionMap {
  std::vector<NodeId> original;           // reduced id -> original node id
  std::map<XKey, std::vector<Leg>> legs;  // keys hold reduced node ids

  // Original node ids along the recorded path, endpoints included.
  std::vector<NodeId> node_sequence(NodeId from, NodeId to, Mode mode) const;
};

struct Reduction {
  ReducedGraph graph;
  ExpansionMap expansion;
};

// Collapses the network onto origin, destination, and the hubs. Every
// ordered pair of hub nodes gets one super-edge per usable mode that
// connects them; the origin's outgoing and the destination's incoming
// connectors are Walk-only unless they coincide with hubs, since vehicles
// exist only at hubs and journeys start and (absent a dock) end on foot.
// Throws NoWalkPathToAnyHub when the origin has no outgoing or the
// destination no incoming super-edge at all; a direct origin->destination
// Walk connector counts. `energy` only prices the consumption recorded on
// expansion legs.
Reduction reduce(const MultiModalGraph& g, const HubRegistry& hubs, NodeId origin,
                 NodeId destination, const UserPreferences& prefs,
                 const EnergyParams& energy = {});

// The same flow MILP as build_model, posed on the collapsed network. The
// query's origin and destination are replaced by the reduced ones; the
// preferences must be the ones the reduction was computed with, because the
// super-edge times already carry their weighting.
MilpModel build_reduced_model(const ReducedGraph& rg, const Query& q);

// Splices each reduced Move leg back into its recorded original legs and
// translates Switch legs to original node ids. Totals are preserved up to
// summation order. Throws MissingExpansion when a leg references a
// super-edge the map does not carry.
Itinerary expand_itinerary(const Itinerary& reduced_itin, const ExpansionMap& map);

// Audit serialization: scenario-style JSON plus an "expansion" side-table.
// Readers throw the scenario file exceptions (ParseError and friends).
std::string reduced_to_string(const Reduction& r);
Reduction reduced_from_string(const std::string& text, const std::string& source);
void save_reduced(const Reduction& r, const std::string& path);
Reduction load_reduced(const std::string& path);

}  // namespace emob
