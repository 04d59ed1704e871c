#include "emob/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "emob/mode.hpp"

namespace emob {

std::optional<Mode> mode_from_name(std::string_view name) {
  for (Mode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string mode_set_label(const std::array<bool, kNumModes>& used) {
  // Name-sorted members: ebike < ecar < escooter < walk.
  static constexpr std::array<Mode, kNumModes> by_name = {Mode::EBike, Mode::ECar,
                                                          Mode::EScooter, Mode::Walk};
  std::string out;
  for (Mode m : by_name) {
    if (!used[mode_index(m)]) continue;
    if (!out.empty()) out += '+';
    out += mode_name(m);
  }
  return out;
}

std::string mode_set_label(const std::vector<Mode>& modes) {
  std::array<bool, kNumModes> used = {};
  for (Mode m : modes) used[mode_index(m)] = true;
  return mode_set_label(used);
}

MultiModalGraph MultiModalGraph::build(const std::vector<NodeInput>& nodes,
                                       const std::vector<ArcInput>& arcs) {
  const int n = static_cast<int>(nodes.size());
  std::vector<bool> seen(n, false);
  MultiModalGraph g;
  g.xs_.assign(n, 0.0);
  g.ys_.assign(n, 0.0);
  for (const NodeInput& nd : nodes) {
    if (nd.id < 0 || nd.id >= n)
      throw GraphBuildError("node id " + std::to_string(nd.id) +
                            " outside dense range [0, " + std::to_string(n) + ")");
    if (seen[nd.id])
      throw DuplicateNodeError("duplicate node id " + std::to_string(nd.id));
    seen[nd.id] = true;
    g.xs_[nd.id] = nd.x;
    g.ys_[nd.id] = nd.y;
  }

  auto arc_label = [](const ArcInput& a) {
    return "arc (" + std::to_string(a.from) + " -> " + std::to_string(a.to) + ")";
  };

  std::vector<Arc> rows;
  rows.reserve(arcs.size());
  for (const ArcInput& a : arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
      throw DanglingArcError(arc_label(a) + " references a node outside the graph");
    if (a.from == a.to)
      throw GraphBuildError(arc_label(a) + " is a self-loop");
    if (!(a.distance_m > 0.0))
      throw NonPositiveWeightError(arc_label(a) + " has non-positive distance " +
                                   std::to_string(a.distance_m));
    bool any_mode = false;
    for (Mode m : kAllModes) {
      double v = a.speed_mps[mode_index(m)];
      if (!speed_present(v)) continue;
      if (!(v > 0.0))
        throw NonPositiveWeightError(arc_label(a) + " has non-positive " +
                                     std::string(mode_name(m)) + " speed " +
                                     std::to_string(v));
      any_mode = true;
    }
    if (!any_mode)
      throw NonPositiveWeightError(arc_label(a) + " permits no mode");
    rows.push_back(Arc{a.from, a.to, a.distance_m, a.speed_mps});
  }

  std::sort(rows.begin(), rows.end(), [](const Arc& x, const Arc& y) {
    return x.from != y.from ? x.from < y.from : x.to < y.to;
  });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].from == rows[i - 1].from && rows[i].to == rows[i - 1].to)
      throw DuplicateArcError("duplicate arc (" + std::to_string(rows[i].from) +
                              " -> " + std::to_string(rows[i].to) + ")");
  }

  g.arcs_ = std::move(rows);
  g.offsets_.assign(n + 1, 0);
  for (const Arc& a : g.arcs_) ++g.offsets_[a.from + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());

  g.in_offsets_.assign(n + 1, 0);
  for (const Arc& a : g.arcs_) ++g.in_offsets_[a.to + 1];
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
  g.in_ids_.assign(g.arcs_.size(), 0);
  std::vector<std::int32_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(g.arcs_.size()); ++i)
    g.in_ids_[cursor[g.arcs_[i].to]++] = i;

  return g;
}

std::vector<NodeId> MultiModalGraph::neighbors(NodeId v) const {
  check_node(v);
  std::vector<NodeId> out;
  out.reserve(offsets_[v + 1] - offsets_[v]);
  for (const Arc& a : out_arcs(v)) out.push_back(a.to);
  return out;
}

const Arc* MultiModalGraph::find_arc(NodeId i, NodeId j) const {
  if (!has_node(i) || !has_node(j)) return nullptr;
  auto first = arcs_.begin() + offsets_[i];
  auto last = arcs_.begin() + offsets_[i + 1];
  auto it = std::lower_bound(first, last, j,
                             [](const Arc& a, NodeId t) { return a.to < t; });
  if (it == last || it->to != j) return nullptr;
  return &*it;
}

HubRegistry::HubRegistry(std::vector<EHub> hubs) : hubs_(std::move(hubs)) {
  std::sort(hubs_.begin(), hubs_.end(),
            [](const EHub& a, const EHub& b) { return a.node < b.node; });
  for (std::size_t i = 0; i < hubs_.size(); ++i) {
    const EHub& h = hubs_[i];
    if (i > 0 && h.node == hubs_[i - 1].node)
      throw std::invalid_argument("two hubs placed on node " + std::to_string(h.node));
    if (h.supported[mode_index(Mode::Walk)])
      throw std::invalid_argument("hub on node " + std::to_string(h.node) +
                                  " lists walk as a supported mode");
    for (Mode m : kVehicleModes) {
      if (h.supports(m) && !(h.best_soc(m) >= 0.0))
        throw std::invalid_argument("hub on node " + std::to_string(h.node) +
                                    " has negative SOC for " +
                                    std::string(mode_name(m)));
    }
  }
}

const EHub* HubRegistry::find(NodeId v) const {
  auto it = std::lower_bound(hubs_.begin(), hubs_.end(), v,
                             [](const EHub& h, NodeId t) { return h.node < t; });
  if (it == hubs_.end() || it->node != v) return nullptr;
  return &*it;
}

DiagnosticsReport validate_scenario(const MultiModalGraph& g, const HubRegistry& hubs) {
  DiagnosticsReport report;
  for (const EHub& h : hubs.hubs()) {
    if (!g.has_node(h.node)) {
      report.entries.push_back({"hub-missing-node",
                                "hub placed on node " + std::to_string(h.node) +
                                    " which is not in the graph"});
      continue;
    }
    // Reverse breadth-first scan: can any other node reach this hub?
    std::vector<bool> seen(g.num_nodes(), false);
    std::deque<NodeId> queue{h.node};
    seen[h.node] = true;
    bool reachable = false;
    while (!queue.empty() && !reachable) {
      NodeId v = queue.front();
      queue.pop_front();
      for (std::int32_t id : g.in_arc_ids(v)) {
        NodeId u = g.arc_at(id).from;
        if (u != h.node) reachable = true;
        if (!seen[u]) {
          seen[u] = true;
          queue.push_back(u);
        }
      }
    }
    if (!reachable)
      report.entries.push_back({"hub-unreachable",
                                "no other node can reach the hub on node " +
                                    std::to_string(h.node)});
    for (Mode m : kVehicleModes) {
      if (h.supports(m) && h.best_soc(m) == 0.0)
        report.entries.push_back({"hub-zero-soc",
                                  "hub on node " + std::to_string(h.node) +
                                      " lists " + std::string(mode_name(m)) +
                                      " with zero SOC"});
    }
  }
  return report;
}

}  // namespace emob
