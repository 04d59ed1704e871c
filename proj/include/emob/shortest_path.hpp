#pragma once

#include <vector>

#include "emob/graph.hpp"
#include "emob/mode.hpp"

namespace emob {

struct ShortestPathTree {
  std::vector<double> time_s;    // +inf where unreachable
  std::vector<double> dist_m;    // metres along the chosen path
  std::vector<NodeId> parent;    // -1 at the source and where unreachable
};

// Single-mode shortest paths on preference-weighted time (alpha * d / V);
// arcs closed to the mode are skipped. Ties between equal-cost paths resolve
// to the lexicographically smallest node sequence so every caller sees the
// same tree.
ShortestPathTree mode_shortest_paths(const MultiModalGraph& g, NodeId source,
                                     Mode mode, double alpha = 1.0);

// Walking distance in metres (unit weight per metre, walk arcs only).
std::vector<double> walk_distance_m(const MultiModalGraph& g, NodeId source);

// Node sequence source..target; empty when unreachable or target == source
// is absent from the tree.
std::vector<NodeId> extract_path(const ShortestPathTree& tree, NodeId source,
                                 NodeId target);

}  // namespace emob
