#include "emob/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>

namespace emob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegralityTol = 1e-6;

bool destination_reachable(int num_nodes, const std::vector<RideOption>& rides,
                           const Query& q) {
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(num_nodes));
  for (const RideOption& r : rides)
    if (q.prefs.usable(r.mode)) adj[r.from].push_back(r.to);
  std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
  std::vector<NodeId> stack = {q.origin};
  seen[q.origin] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (v == q.dest) return true;
    for (NodeId w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

}  // namespace

MilpModel build_model(const MultiModalGraph& g, const HubRegistry& hubs,
                      const Query& q) {
  q.validate(g);
  std::vector<RideOption> rides;
  for (const Arc& a : g.all_arcs())
    for (Mode s : kAllModes) {
      if (!a.permits(s) || !q.prefs.usable(s)) continue;
      rides.push_back({a.from, a.to, s,
                       travel_cost(q.prefs, a.distance_m, a.speed(s), s),
                       a.distance_m});
    }
  return build_model_from_rides(g.num_nodes(), rides, hubs, q);
}

MilpModel build_model_from_rides(int num_nodes, const std::vector<RideOption>& rides,
                                 const HubRegistry& hubs, const Query& q) {
  q.prefs.validate();
  q.energy.validate();
  q.transitions.validate();
  if (q.origin < 0 || q.origin >= num_nodes)
    throw UnknownNodeError("origin node does not exist");
  if (q.dest < 0 || q.dest >= num_nodes)
    throw UnknownNodeError("destination node does not exist");
  if (q.origin == q.dest) throw std::invalid_argument("origin equals destination");
  for (const RideOption& r : rides)
    if (r.from < 0 || r.from >= num_nodes || r.to < 0 || r.to >= num_nodes)
      throw UnknownNodeError("ride endpoint does not exist");
  if (!destination_reachable(num_nodes, rides, q))
    throw UnreachableDestination("no arc sequence connects " +
                                 std::to_string(q.origin) + " to " +
                                 std::to_string(q.dest));

  MilpModel mm;
  lp::LinearModel& m = mm.model;
  VariableIndex& ix = mm.index;

  // A vehicle mode participates only when some hub can hand it out.
  std::array<bool, kNumModes> active = {};
  PerMode<double> emax = {};
  active[mode_index(Mode::Walk)] = true;
  for (Mode s : kVehicleModes) {
    if (!q.prefs.usable(s)) continue;
    for (const EHub& h : hubs.hubs()) {
      if (!h.supports(s)) continue;
      active[mode_index(s)] = true;
      emax[mode_index(s)] = std::max(emax[mode_index(s)], h.best_soc(s));
    }
  }
  // Charge above what all ridable arcs together could drain can never be
  // spent, so capping the charge scale there keeps every integral point
  // feasible while keeping the propagation constants small.
  for (Mode s : kVehicleModes) {
    if (!active[mode_index(s)]) continue;
    double drain_total = 0.0;
    for (const RideOption& r : rides)
      if (r.mode == s) drain_total += q.energy.rho(s) * r.distance_m;
    emax[mode_index(s)] = std::min(emax[mode_index(s)], drain_total);
  }

  for (const RideOption& r : rides) {
    if (!active[mode_index(r.mode)]) continue;
    // A dead battery cannot ride a consuming arc at all.
    if (is_vehicle(r.mode) && emax[mode_index(r.mode)] == 0.0 &&
        q.energy.rho(r.mode) * r.distance_m > 0.0)
      continue;
    XKey key{r.from, r.to, r.mode};
    int col = m.add_column(r.cost_s, 0.0, 1.0, true);
    if (!ix.x_vars.emplace(key, col).second)
      throw std::invalid_argument("duplicate ride option");
    mm.ride_distance_m.emplace(key, r.distance_m);
  }
  // Charge variables only where the mode can actually appear: endpoints of
  // arcs it may ride and hubs that hand it out. They are normalized to
  // [0, 1] in units of the mode's charge cap so every row stays near unit
  // scale regardless of battery size.
  std::vector<std::array<char, kNumModes>> incident(
      static_cast<std::size_t>(num_nodes), std::array<char, kNumModes>{});
  for (const RideOption& r : rides)
    if (is_vehicle(r.mode) && active[mode_index(r.mode)])
      incident[r.from][mode_index(r.mode)] = incident[r.to][mode_index(r.mode)] = 1;
  for (const EHub& h : hubs.hubs())
    for (Mode s : kVehicleModes)
      if (active[mode_index(s)] && h.supports(s)) incident[h.node][mode_index(s)] = 1;
  for (NodeId v = 0; v < num_nodes; ++v)
    for (Mode s : kVehicleModes)
      if (incident[v][mode_index(s)] && emax[mode_index(s)] > 0.0)
        ix.e_vars[{v, s}] = m.add_column(0.0, 0.0, 1.0, false);
  for (const EHub& h : hubs.hubs()) {
    for (Mode s : kAllModes) {
      for (Mode sp : kAllModes) {
        if (s == sp || !active[mode_index(s)] || !active[mode_index(sp)]) continue;
        auto fee = transition_cost(q.transitions, &h, s, sp);
        if (!fee.has_value()) continue;
        ix.y_vars[{h.node, s, sp}] = m.add_column(*fee, 0.0, 1.0, true);
      }
    }
  }

  // Mode exclusivity per (from, to) pair; single-mode pairs are already
  // covered by the [0,1] column bound.
  {
    std::vector<std::vector<int>> groups;
    std::map<std::pair<NodeId, NodeId>, std::size_t> group_of;
    for (const RideOption& r : rides) {
      auto it = ix.x_vars.find({r.from, r.to, r.mode});
      if (it == ix.x_vars.end()) continue;
      auto [git, inserted] = group_of.emplace(std::pair{r.from, r.to}, groups.size());
      if (inserted) groups.emplace_back();
      groups[git->second].push_back(it->second);
    }
    for (const std::vector<int>& cols : groups) {
      if (cols.size() < 2) continue;
      std::vector<lp::RowEntry> entries;
      for (int col : cols) entries.push_back({col, 1.0});
      m.add_row(lp::Sense::LessEq, 1.0, std::move(entries));
    }
  }

  // Unit-flow balance per (node, mode) state, switches coupling states at
  // hubs. The destination absorbs the unit in Walk or a dockable mode.
  std::array<bool, kNumModes> absorbing = {};
  absorbing[mode_index(Mode::Walk)] = true;
  if (const EHub* dh = hubs.find(q.dest))
    for (Mode s : kVehicleModes)
      if (active[mode_index(s)] && dh->supports(s)) absorbing[mode_index(s)] = true;

  std::map<EKey, std::vector<int>> x_out, x_in;
  for (const RideOption& r : rides) {
    auto it = ix.x_vars.find({r.from, r.to, r.mode});
    if (it == ix.x_vars.end()) continue;
    x_out[{r.from, r.mode}].push_back(it->second);
    x_in[{r.to, r.mode}].push_back(it->second);
  }

  auto state_entries = [&](NodeId v, Mode s) {
    std::vector<lp::RowEntry> entries;
    if (auto it = x_out.find({v, s}); it != x_out.end())
      for (int col : it->second) entries.push_back({col, 1.0});
    if (auto it = x_in.find({v, s}); it != x_in.end())
      for (int col : it->second) entries.push_back({col, -1.0});
    for (Mode sp : kAllModes) {
      if (auto it = ix.y_vars.find({v, s, sp}); it != ix.y_vars.end())
        entries.push_back({it->second, 1.0});
      if (auto it = ix.y_vars.find({v, sp, s}); it != ix.y_vars.end())
        entries.push_back({it->second, -1.0});
    }
    return entries;
  };

  for (NodeId v = 0; v < num_nodes; ++v) {
    if (v == q.dest) {
      std::vector<lp::RowEntry> agg;
      for (Mode s : kAllModes) {
        if (!active[mode_index(s)]) continue;
        if (!absorbing[mode_index(s)]) {
          auto entries = state_entries(v, s);
          if (!entries.empty()) m.add_row(lp::Sense::Equal, 0.0, std::move(entries));
          continue;
        }
        for (const lp::RowEntry& e : state_entries(v, s)) {
          auto it = std::find_if(agg.begin(), agg.end(),
                                 [&](const lp::RowEntry& x) { return x.col == e.col; });
          if (it == agg.end())
            agg.push_back(e);
          else
            it->coef += e.coef;
        }
      }
      m.add_row(lp::Sense::Equal, -1.0, std::move(agg));
      continue;
    }
    for (Mode s : kAllModes) {
      if (!active[mode_index(s)]) continue;
      auto entries = state_entries(v, s);
      double rhs = (v == q.origin && s == Mode::Walk) ? 1.0 : 0.0;
      if (entries.empty() && rhs == 0.0) continue;
      m.add_row(lp::Sense::Equal, rhs, std::move(entries));
    }
  }

  if (!ix.y_vars.empty()) {
    std::vector<lp::RowEntry> entries;
    for (const auto& [key, col] : ix.y_vars) entries.push_back({col, 1.0});
    m.add_row(lp::Sense::LessEq, static_cast<double>(q.prefs.t_max),
              std::move(entries));
  }

  // Charge propagation along ridden arcs and reset on pickup, in cap units.
  for (const RideOption& r : rides) {
    if (!is_vehicle(r.mode)) continue;
    auto it = ix.x_vars.find({r.from, r.to, r.mode});
    if (it == ix.x_vars.end()) continue;
    double cap = emax[mode_index(r.mode)];
    if (cap <= 0.0) continue;  // only drain-free arcs reach this point
    double drain = q.energy.rho(r.mode) * r.distance_m / cap;
    m.add_row(lp::Sense::LessEq, 1.0,
              {{ix.e_vars.at({r.to, r.mode}), 1.0},
               {ix.e_vars.at({r.from, r.mode}), -1.0},
               {it->second, 1.0 + drain}});
  }
  for (const EHub& h : hubs.hubs()) {
    for (Mode s : kVehicleModes) {
      if (!active[mode_index(s)] || !h.supports(s)) continue;
      double cap = emax[mode_index(s)];
      if (cap <= 0.0) continue;
      double slack = 1.0 - h.best_soc(s) / cap;
      if (slack <= 0.0) continue;  // a full battery here never binds
      std::vector<lp::RowEntry> entries = {{ix.e_vars.at({h.node, s}), 1.0}};
      for (Mode sp : kAllModes)
        if (auto it = ix.y_vars.find({h.node, sp, s}); it != ix.y_vars.end())
          entries.push_back({it->second, slack});
      if (entries.size() >= 2) m.add_row(lp::Sense::LessEq, 1.0, std::move(entries));
    }
  }

  return mm;
}

namespace {

struct BnbNode {
  double bound = -kInf;
  long id = 0;
  std::vector<std::pair<int, std::int8_t>> fixings;
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    return std::tie(a.bound, a.id) > std::tie(b.bound, b.id);
  }
};

void check_assignment(const lp::LinearModel& m, const std::vector<double>& x) {
  for (int i = 0; i < m.num_rows(); ++i) {
    double lhs = 0.0, scale = 1.0;
    for (const lp::RowEntry& e : m.rows[i]) {
      lhs += e.coef * x[e.col];
      scale = std::max(scale, std::abs(e.coef));
    }
    double slack = lhs - m.rhs[i];
    bool bad = (m.senses[i] == lp::Sense::LessEq && slack > 1e-6 * scale) ||
               (m.senses[i] == lp::Sense::GreaterEq && slack < -1e-6 * scale) ||
               (m.senses[i] == lp::Sense::Equal && std::abs(slack) > 1e-6 * scale);
    if (bad)
      throw lp::NumericalBreakdown("integral point violates row " +
                                   std::to_string(i));
  }
}

}  // namespace

MilpResult solve(const MilpModel& mm, const MilpLimits& limits) {
  const lp::LinearModel& m = mm.model;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  MilpResult res;
  double incumbent = kInf;
  std::vector<double> best_x;

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  open.push({});
  long next_id = 1;
  lp::SimplexOptions lp_opt;

  auto prunable = [&](double bound) {
    return incumbent < kInf && bound >= incumbent - 1e-9 * std::abs(incumbent);
  };

  while (!open.empty()) {
    if (limits.time_ms > 0 && elapsed_ms() > static_cast<double>(limits.time_ms)) {
      res.status = MilpStatus::TimeLimit;
      break;
    }
    if (res.stats.bb_nodes >= limits.max_bb_nodes) {
      res.status = MilpStatus::NodeLimit;
      break;
    }
    BnbNode node = open.top();
    open.pop();
    if (prunable(node.bound)) continue;

    std::vector<double> lo = m.lower, hi = m.upper;
    for (auto [col, v] : node.fixings) lo[col] = hi[col] = static_cast<double>(v);
    ++res.stats.bb_nodes;
    lp::LpResult lpres = lp::solve_lp(m, lp_opt, &lo, &hi);
    res.stats.lp_iterations += lpres.iterations;
    if (lpres.status == lp::LpStatus::Infeasible) continue;
    if (lpres.status != lp::LpStatus::Optimal)
      throw lp::NumericalBreakdown("relaxation of a bounded model reported unbounded");
    if (prunable(lpres.objective)) continue;

    int branch_col = -1;
    double most_frac = kIntegralityTol;
    for (int j = 0; j < m.num_cols(); ++j) {
      if (!m.integral[j]) continue;
      double dist = std::abs(lpres.x[j] - std::round(lpres.x[j]));
      if (dist > most_frac) {
        most_frac = dist;
        branch_col = j;
      }
    }
    if (branch_col < 0) {
      check_assignment(m, lpres.x);
      if (lpres.objective < incumbent) {
        incumbent = lpres.objective;
        best_x = lpres.x;
        for (int j = 0; j < m.num_cols(); ++j)
          if (m.integral[j]) best_x[j] = std::round(best_x[j]);
      }
      continue;
    }
    for (std::int8_t v : {std::int8_t{0}, std::int8_t{1}}) {
      BnbNode child;
      child.bound = lpres.objective;
      child.id = next_id++;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_col, v);
      open.push(std::move(child));
    }
  }

  if (open.empty())
    res.status = incumbent < kInf ? MilpStatus::Optimal : MilpStatus::Infeasible;
  if (incumbent < kInf) {
    res.has_incumbent = true;
    res.objective = incumbent;
    for (const auto& [key, col] : mm.index.x_vars)
      if (best_x[col] > 0.5) res.x_assignment.push_back(key);
    for (const auto& [key, col] : mm.index.y_vars)
      if (best_x[col] > 0.5) res.y_assignment.push_back(key);
  }
  res.stats.wall_ms = elapsed_ms();
  return res;
}

Itinerary extract_itinerary(const MilpResult& result, const MilpModel& mm,
                            const Query& q) {
  if (result.status != MilpStatus::Optimal)
    throw std::invalid_argument("itinerary extraction needs an optimal result");

  std::map<std::pair<NodeId, Mode>, std::vector<XKey>> rides;
  std::map<std::pair<NodeId, Mode>, std::vector<YKey>> switches;
  for (const XKey& k : result.x_assignment)
    rides[{std::get<0>(k), std::get<2>(k)}].push_back(k);
  for (const YKey& k : result.y_assignment)
    switches[{std::get<0>(k), std::get<1>(k)}].push_back(k);

  std::size_t used_x = 0;
  std::vector<Leg> legs;
  NodeId node = q.origin;
  Mode mode = Mode::Walk;
  const std::size_t max_steps =
      result.x_assignment.size() + result.y_assignment.size();
  for (std::size_t step = 0; step <= max_steps; ++step) {
    auto rit = rides.find({node, mode});
    if (rit != rides.end() && !rit->second.empty()) {
      if (rit->second.size() > 1)
        throw DisconnectedSelection("two selected rides depart one state");
      XKey k = rit->second.front();
      rit->second.clear();
      ++used_x;
      NodeId to = std::get<1>(k);
      double dist = mm.ride_distance_m.at(k);
      double seconds = mm.model.objective[mm.index.x_vars.at(k)];
      double wh = is_vehicle(mode) ? q.energy.rho(mode) * dist : 0.0;
      legs.push_back(Leg::move(node, to, mode, dist, seconds, wh));
      node = to;
      continue;
    }
    auto sit = switches.find({node, mode});
    if (sit != switches.end() && !sit->second.empty()) {
      YKey k = sit->second.front();
      sit->second.erase(sit->second.begin());
      Mode to_mode = std::get<2>(k);
      legs.push_back(Leg::mode_switch(node, mode, to_mode,
                                      mm.model.objective[mm.index.y_vars.at(k)]));
      mode = to_mode;
      continue;
    }
    break;
  }

  if (node != q.dest)
    throw DisconnectedSelection("selected arcs end at node " + std::to_string(node) +
                                ", not the destination");
  if (used_x != result.x_assignment.size())
    throw DisconnectedSelection("selection contains rides disjoint from the path");
  return Itinerary::from_legs(std::move(legs));
}

}  // namespace emob
