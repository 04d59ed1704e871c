#include "emob/shortest_path.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace emob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<NodeId> chain(const std::vector<NodeId>& parent, NodeId v) {
  std::vector<NodeId> seq{v};
  while (parent[v] >= 0) {
    v = parent[v];
    seq.push_back(v);
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

// True when the path (chain(u) + [v]) precedes (chain(v)) lexicographically.
bool candidate_precedes(const std::vector<NodeId>& parent, NodeId u, NodeId v) {
  std::vector<NodeId> a = chain(parent, u);
  a.push_back(v);
  std::vector<NodeId> b = chain(parent, v);
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

ShortestPathTree mode_shortest_paths(const MultiModalGraph& g, NodeId source,
                                     Mode mode, double alpha) {
  const int n = g.num_nodes();
  ShortestPathTree t;
  t.time_s.assign(n, kInf);
  t.dist_m.assign(n, kInf);
  t.parent.assign(n, -1);
  t.time_s[source] = 0.0;
  t.dist_m[source] = 0.0;

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.push({0.0, source});
  std::vector<bool> done(n, false);

  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    for (const Arc& a : g.out_arcs(u)) {
      if (!a.permits(mode)) continue;
      double nd = d + alpha * a.distance_m / a.speed(mode);
      if (nd < t.time_s[a.to]) {
        t.time_s[a.to] = nd;
        t.dist_m[a.to] = t.dist_m[u] + a.distance_m;
        t.parent[a.to] = u;
        pq.push({nd, a.to});
      } else if (nd == t.time_s[a.to] && !done[a.to] &&
                 candidate_precedes(t.parent, u, a.to)) {
        t.dist_m[a.to] = t.dist_m[u] + a.distance_m;
        t.parent[a.to] = u;
      }
    }
  }
  return t;
}

std::vector<double> walk_distance_m(const MultiModalGraph& g, NodeId source) {
  const int n = g.num_nodes();
  std::vector<double> dist(n, kInf);
  dist[source] = 0.0;
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.push({0.0, source});
  std::vector<bool> done(n, false);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    for (const Arc& a : g.out_arcs(u)) {
      if (!a.permits(Mode::Walk)) continue;
      double nd = d + a.distance_m;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        pq.push({nd, a.to});
      }
    }
  }
  return dist;
}

std::vector<NodeId> extract_path(const ShortestPathTree& tree, NodeId source,
                                 NodeId target) {
  if (tree.time_s[target] == kInf) return {};
  std::vector<NodeId> seq = chain(tree.parent, target);
  if (seq.front() != source) return {};
  return seq;
}

}  // namespace emob
