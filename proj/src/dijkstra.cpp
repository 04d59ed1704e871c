#include "emob/dijkstra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>

#include "emob/cost.hpp"

namespace emob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kWalkCharge = std::numeric_limits<std::int64_t>::max();

struct Label {
  double elapsed = 0.0;
  NodeId node = 0;
  Mode mode = Mode::Walk;
  int transitions = 0;
  double soc = kInf;  // +inf while walking
  std::int32_t parent = -1;
  std::int32_t arc_id = -1;       // ride taken to get here, -1 for a pure switch
  Mode prev_mode = Mode::Walk;    // mode before the switch step, == mode if none
  double switch_fee = 0.0;
  bool switched = false;
  bool retired = false;
};

// Queue key: elapsed, then transitions, node, mode order, insertion order.
using QueueKey = std::tuple<double, int, NodeId, int, std::int32_t>;

struct QueueEntry {
  QueueKey key;
  std::int32_t label;
  bool operator>(const QueueEntry& o) const { return key > o.key; }
};

using MinQueue =
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

void push_label(std::vector<Label>& pool, MinQueue& pq, Label l) {
  std::int32_t idx = static_cast<std::int32_t>(pool.size());
  pool.push_back(l);
  pq.push({{l.elapsed, l.transitions, l.node, mode_index(l.mode), idx}, idx});
}

Itinerary reconstruct(const std::vector<Label>& pool, std::int32_t leaf,
                      const MultiModalGraph& g, const Query& q) {
  std::vector<std::int32_t> order;
  for (std::int32_t i = leaf; i >= 0; i = pool[i].parent) order.push_back(i);
  std::reverse(order.begin(), order.end());
  std::vector<Leg> legs;
  for (std::int32_t i : order) {
    const Label& l = pool[i];
    if (l.parent < 0) continue;
    if (l.switched) {
      NodeId at = l.arc_id >= 0 ? g.arc_at(l.arc_id).from : l.node;
      legs.push_back(Leg::mode_switch(at, l.prev_mode, l.mode, l.switch_fee));
    }
    if (l.arc_id >= 0) {
      const Arc& a = g.arc_at(l.arc_id);
      double seconds = travel_cost(q.prefs, a.distance_m, a.speed(l.mode), l.mode);
      double wh = is_vehicle(l.mode) ? q.energy.rho(l.mode) * a.distance_m : 0.0;
      legs.push_back(Leg::move(a.from, a.to, l.mode, a.distance_m, seconds, wh));
    }
  }
  return Itinerary::from_legs(std::move(legs));
}

}  // namespace

std::optional<Itinerary> route_dijkstra(const MultiModalGraph& g, const HubRegistry& hubs,
                                     const Query& q, SearchTrace* trace) {
  q.validate(g);
  std::vector<Label> pool;
  MinQueue pq;
  Label root;
  root.node = q.origin;
  push_label(pool, pq, root);

  std::vector<bool> visited(g.num_nodes(), false);
  while (!pq.empty()) {
    std::int32_t li = pq.top().label;
    pq.pop();
    Label cur = pool[li];
    if (cur.node == q.dest) {
      if (can_end_in(cur.mode, q.dest, hubs)) return reconstruct(pool, li, g, q);
      continue;  // undockable arrival; later arrivals may still finish
    }
    if (visited[cur.node]) continue;
    visited[cur.node] = true;
    if (trace != nullptr) trace->popped_elapsed.push_back(cur.elapsed);

    const EHub* hub = hubs.find(cur.node);
    const Arc* base = g.all_arcs().data();
    for (const Arc& a : g.out_arcs(cur.node)) {
      std::int32_t arc_id = static_cast<std::int32_t>(&a - base);
      for (Mode s : kAllModes) {
        if (!a.permits(s) || !q.prefs.usable(s)) continue;
        double fee = 0.0;
        int transitions = cur.transitions;
        double soc = cur.soc;
        bool switched = false;
        if (s != cur.mode) {
          if (transitions + 1 > q.prefs.t_max) continue;
          auto fee_opt = transition_cost(q.transitions, hub, cur.mode, s);
          if (!fee_opt.has_value()) continue;
          fee = *fee_opt;
          transitions += 1;
          switched = true;
          soc = is_vehicle(s) ? hub->best_soc(s) : kInf;
        }
        if (is_vehicle(s)) {
          double after = soc - q.energy.rho(s) * a.distance_m;
          if (after < 0.0) continue;
          soc = after;
        } else {
          soc = kInf;
        }
        double ride = travel_cost(q.prefs, a.distance_m, a.speed(s), s);
        Label next;
        next.elapsed = cur.elapsed + fee + ride;
        next.node = a.to;
        next.mode = s;
        next.transitions = transitions;
        next.soc = soc;
        next.parent = li;
        next.arc_id = arc_id;
        next.prev_mode = cur.mode;
        next.switch_fee = fee;
        next.switched = switched;
        push_label(pool, pq, next);
      }
    }
  }
  return std::nullopt;
}

namespace {

struct FrontierEntry {
  int transitions;
  std::int64_t charge;
  double elapsed;
  std::int32_t label;
};

bool covers(const FrontierEntry& a, int transitions, std::int64_t charge,
            double elapsed) {
  return a.transitions <= transitions && a.charge >= charge && a.elapsed <= elapsed;
}

}  // namespace

std::optional<Itinerary> route_exact(const MultiModalGraph& g, const HubRegistry& hubs,
                                     const Query& q, double energy_quantum_wh) {
  q.validate(g);
  if (!(energy_quantum_wh > 0.0))
    throw std::invalid_argument("energy quantum must be positive");

  auto quantize = [&](Mode m, double soc) {
    return m == Mode::Walk ? kWalkCharge : std::llround(soc / energy_quantum_wh);
  };

  std::vector<Label> pool;
  MinQueue pq;
  // frontier[(node, mode)]: mutually non-dominated labels seen so far.
  std::vector<std::vector<FrontierEntry>> frontier(
      static_cast<std::size_t>(g.num_nodes()) * kNumModes);
  auto cell = [&](NodeId v, Mode m) -> std::vector<FrontierEntry>& {
    return frontier[static_cast<std::size_t>(v) * kNumModes + mode_index(m)];
  };

  auto try_push = [&](Label l) {
    std::int64_t charge = quantize(l.mode, l.soc);
    auto& entries = cell(l.node, l.mode);
    for (const FrontierEntry& e : entries)
      if (covers(e, l.transitions, charge, l.elapsed)) return;
    std::int32_t idx = static_cast<std::int32_t>(pool.size());
    for (auto it = entries.begin(); it != entries.end();) {
      if (it->transitions >= l.transitions && it->charge <= charge &&
          it->elapsed >= l.elapsed) {
        pool[it->label].retired = true;
        it = entries.erase(it);
      } else {
        ++it;
      }
    }
    entries.push_back({l.transitions, charge, l.elapsed, idx});
    pool.push_back(l);
    pq.push({{l.elapsed, l.transitions, l.node, mode_index(l.mode), idx}, idx});
  };

  Label root;
  root.node = q.origin;
  try_push(root);

  while (!pq.empty()) {
    std::int32_t li = pq.top().label;
    pq.pop();
    Label cur = pool[li];
    if (cur.retired) continue;
    if (cur.node == q.dest && can_end_in(cur.mode, q.dest, hubs))
      return reconstruct(pool, li, g, q);

    const EHub* hub = hubs.find(cur.node);
    if (hub != nullptr && cur.transitions < q.prefs.t_max) {
      for (Mode s : kAllModes) {
        if (s == cur.mode || !q.prefs.usable(s)) continue;
        auto fee = transition_cost(q.transitions, hub, cur.mode, s);
        if (!fee.has_value()) continue;
        Label next;
        next.elapsed = cur.elapsed + *fee;
        next.node = cur.node;
        next.mode = s;
        next.transitions = cur.transitions + 1;
        next.soc = is_vehicle(s) ? hub->best_soc(s) : kInf;
        next.parent = li;
        next.arc_id = -1;
        next.prev_mode = cur.mode;
        next.switch_fee = *fee;
        next.switched = true;
        try_push(next);
      }
    }
    if (!q.prefs.usable(cur.mode)) continue;
    for (const Arc& a : g.out_arcs(cur.node)) {
      if (!a.permits(cur.mode)) continue;
      double soc = cur.soc;
      if (is_vehicle(cur.mode)) {
        soc -= q.energy.rho(cur.mode) * a.distance_m;
        if (soc < 0.0) continue;
      }
      Label next;
      next.elapsed = cur.elapsed +
                     travel_cost(q.prefs, a.distance_m, a.speed(cur.mode), cur.mode);
      next.node = a.to;
      next.mode = cur.mode;
      next.transitions = cur.transitions;
      next.soc = soc;
      next.parent = li;
      next.arc_id = static_cast<std::int32_t>(&a - g.all_arcs().data());
      next.prev_mode = cur.mode;
      try_push(next);
    }
  }
  return std::nullopt;
}

}  // namespace emob
