#include "emob/oracle.hpp"

#include <limits>
#include <string>
#include <vector>

#include "emob/cost.hpp"

namespace emob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Search {
  const MultiModalGraph& g;
  const HubRegistry& hubs;
  const Query& q;
  const OracleLimits& limits;

  std::vector<char> state_on_path = {};  // (node, mode) pairs on the current walk
  std::vector<Leg> legs = {};
  std::int64_t expansions = 0;

  double best = kInf;
  int best_transitions = 0;
  std::optional<Itinerary> best_itinerary = std::nullopt;

  char& on_path(NodeId v, Mode m) {
    return state_on_path[static_cast<std::size_t>(v) * kNumModes + mode_index(m)];
  }

  // True while the branch can still beat or tie-break the incumbent.
  bool promising(double elapsed, int transitions) const {
    if (elapsed < best) return true;
    return elapsed == best && transitions < best_transitions;
  }

  void record(double elapsed, int transitions) {
    best = elapsed;
    best_transitions = transitions;
    best_itinerary = Itinerary::from_legs(legs);
  }

  void visit(NodeId node, Mode mode, int transitions, double soc, double elapsed) {
    if (++expansions > limits.max_states)
      throw TooLargeError("state cap of " + std::to_string(limits.max_states) +
                          " expansions exceeded");
    if (!promising(elapsed, transitions)) return;
    if (node == q.dest && !legs.empty() && can_end_in(mode, node, hubs))
      record(elapsed, transitions);

    const EHub* hub = hubs.find(node);
    if (hub != nullptr && transitions < q.prefs.t_max) {
      for (Mode s : kAllModes) {
        if (s == mode || !q.prefs.usable(s)) continue;
        if (on_path(node, s)) continue;
        auto fee = transition_cost(q.transitions, hub, mode, s);
        if (!fee.has_value()) continue;
        double soc_after = is_vehicle(s) ? hub->best_soc(s) : kInf;
        on_path(node, s) = 1;
        legs.push_back(Leg::mode_switch(node, mode, s, *fee));
        visit(node, s, transitions + 1, soc_after, elapsed + *fee);
        legs.pop_back();
        on_path(node, s) = 0;
      }
    }
    if (!q.prefs.usable(mode)) return;
    for (const Arc& a : g.out_arcs(node)) {
      if (!a.permits(mode)) continue;
      if (on_path(a.to, mode)) continue;
      double soc_after = soc;
      if (is_vehicle(mode)) {
        soc_after = soc - q.energy.rho(mode) * a.distance_m;
        if (soc_after < 0.0) continue;
      }
      double ride = travel_cost(q.prefs, a.distance_m, a.speed(mode), mode);
      double wh = is_vehicle(mode) ? q.energy.rho(mode) * a.distance_m : 0.0;
      on_path(a.to, mode) = 1;
      legs.push_back(Leg::move(node, a.to, mode, a.distance_m, ride, wh));
      visit(a.to, mode, transitions, soc_after, elapsed + ride);
      legs.pop_back();
      on_path(a.to, mode) = 0;
    }
  }
};

}  // namespace

std::optional<Itinerary> enumerate_optimal(const MultiModalGraph& g,
                                           const HubRegistry& hubs, const Query& q,
                                           const OracleLimits& limits) {
  q.validate(g);
  if (g.num_nodes() > limits.max_nodes)
    throw TooLargeError("instance has " + std::to_string(g.num_nodes()) +
                        " nodes, cap is " + std::to_string(limits.max_nodes));
  if (kNumModes * g.num_nodes() > limits.max_path_len)
    throw TooLargeError("worst-case walk length " +
                        std::to_string(kNumModes * g.num_nodes()) +
                        " exceeds cap " + std::to_string(limits.max_path_len));

  Search search{g, hubs, q, limits};
  search.state_on_path.assign(static_cast<std::size_t>(g.num_nodes()) * kNumModes, 0);
  search.on_path(q.origin, Mode::Walk) = 1;
  search.visit(q.origin, Mode::Walk, 0, kInf, 0.0);
  return search.best_itinerary;
}

}  // namespace emob
