#pragma once

#include <vector>

#include "emob/graph.hpp"
#include "emob/rng.hpp"

namespace emob::testutil {

inline PerMode<double> all_speeds(double v) { return {v, v, v, v}; }

inline PerMode<double> walk_only_speed(double v) {
  return {v, kNoSpeed, kNoSpeed, kNoSpeed};
}

inline std::vector<NodeInput> make_nodes(int n) {
  std::vector<NodeInput> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({i, static_cast<double>(i), 0.0});
  return nodes;
}

// Bidirectional chain 0 - 1 - ... - n-1 with uniform distance and speeds.
inline MultiModalGraph make_line_graph(int n, double distance_m,
                                       PerMode<double> speeds) {
  std::vector<ArcInput> arcs;
  for (int i = 0; i + 1 < n; ++i) {
    arcs.push_back({i, i + 1, distance_m, speeds});
    arcs.push_back({i + 1, i, distance_m, speeds});
  }
  return MultiModalGraph::build(make_nodes(n), arcs);
}

// Connected random digraph: a random spanning chain in both directions plus
// extra seeded arcs. Integer distances keep derived quantities on a coarse
// binary grid.
inline MultiModalGraph make_random_graph(std::uint64_t seed, int n, int extra_arcs) {
  SplitMix64 rng(seed);
  std::vector<NodeId> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<ArcInput> arcs;
  auto add = [&](NodeId a, NodeId b) {
    for (const ArcInput& e : arcs)
      if (e.from == a && e.to == b) return;
    double d = static_cast<double>(rng.uniform_int(50, 500));
    arcs.push_back({a, b, d, all_speeds(static_cast<double>(rng.uniform_int(1, 10)))});
  };
  for (int i = 0; i + 1 < n; ++i) {
    add(order[i], order[i + 1]);
    add(order[i + 1], order[i]);
  }
  for (int e = 0; e < extra_arcs; ++e) {
    NodeId a = static_cast<NodeId>(rng.next_below(n));
    NodeId b = static_cast<NodeId>(rng.next_below(n));
    if (a != b) add(a, b);
  }
  return MultiModalGraph::build(make_nodes(n), arcs);
}

}  // namespace emob::testutil
