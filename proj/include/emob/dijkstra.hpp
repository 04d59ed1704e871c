#pragma once

#include <optional>
#include <vector>

#include "emob/graph.hpp"
#include "emob/itinerary.hpp"

namespace emob {

struct SearchTrace {
  std::vector<double> popped_elapsed;
};

// Best-first search with a node-keyed visited set: once any state at a node
// has been expanded, every later state at that node is dropped no matter its
// mode, remaining charge or transition count. Fast, but can miss the global
// optimum when the first arrival at a junction is in a mode that cannot
// continue. Returns the first destination state that satisfies the docking
// rule, or nullopt.
std::optional<Itinerary> route_dijkstra(const MultiModalGraph& g, const HubRegistry& hubs,
                                     const Query& q, SearchTrace* trace = nullptr);

// Label-setting variant keyed on (node, mode, transitions, quantized charge)
// with dominance pruning; exact whenever every per-arc consumption is an
// integer multiple of energy_quantum_wh.
std::optional<Itinerary> route_exact(const MultiModalGraph& g, const HubRegistry& hubs,
                                     const Query& q, double energy_quantum_wh = 0.1);

}  // namespace emob
