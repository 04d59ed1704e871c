#include "emob/itinerary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace emob {

namespace {

bool close(double a, double b) {
  double tol = 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol;
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

}  // namespace

Leg Leg::move(NodeId from, NodeId to, Mode mode, double distance_m, double seconds,
              double wh_consumed) {
  Leg l;
  l.kind = Kind::Move;
  l.from = from;
  l.to = to;
  l.mode = mode;
  l.next_mode = mode;
  l.distance_m = distance_m;
  l.seconds = seconds;
  l.wh_consumed = wh_consumed;
  return l;
}

Leg Leg::mode_switch(NodeId at, Mode from_mode, Mode to_mode, double seconds) {
  Leg l;
  l.kind = Kind::Switch;
  l.from = at;
  l.to = at;
  l.mode = from_mode;
  l.next_mode = to_mode;
  l.seconds = seconds;
  return l;
}

Itinerary Itinerary::from_legs(std::vector<Leg> legs) {
  if (legs.empty()) throw std::invalid_argument("itinerary needs at least one leg");
  Itinerary it;
  it.legs = std::move(legs);
  for (const Leg& l : it.legs) {
    it.total_seconds += l.seconds;
    if (l.kind == Leg::Kind::Switch) ++it.transitions;
  }
  return it;
}

std::vector<Mode> Itinerary::modes_used() const {
  std::vector<Mode> out;
  for (const Leg& l : legs) {
    if (l.kind != Leg::Kind::Move) continue;
    if (std::find(out.begin(), out.end(), l.mode) == out.end()) out.push_back(l.mode);
  }
  std::sort(out.begin(), out.end(),
            [](Mode a, Mode b) { return mode_index(a) < mode_index(b); });
  return out;
}

std::string explain(const Itinerary& it) {
  std::string out;
  out += fmt("%-4s %-8s %-14s %-10s %12s %12s %10s\n", "#", "kind", "nodes", "mode",
             "dist_m", "seconds", "wh");
  int i = 0;
  for (const Leg& l : it.legs) {
    if (l.kind == Leg::Kind::Move) {
      out += fmt("%-4d %-8s %5d -> %-5d %-10s %12.3f %12.6f %10.4f\n", i, "move",
                 l.from, l.to, mode_name(l.mode), l.distance_m, l.seconds,
                 l.wh_consumed);
    } else {
      std::string sw =
          std::string(mode_name(l.mode)) + ">" + std::string(mode_name(l.next_mode));
      out += fmt("%-4d %-8s %5d          %-10s %12.3f %12.6f %10.4f\n", i, "switch",
                 l.from, sw.c_str(), 0.0, l.seconds, 0.0);
    }
    ++i;
  }
  out += fmt("total %.9f seconds, %d transitions\n", it.total_seconds, it.transitions);
  return out;
}

void ResimulationReport::fail(std::string msg) {
  ok = false;
  violations.push_back(std::move(msg));
}

ResimulationReport resimulate(const MultiModalGraph& g, const HubRegistry& hubs,
                              const Query& q, const Itinerary& it) {
  ResimulationReport rep;
  q.validate(g);

  if (it.legs.empty()) {
    rep.fail("empty itinerary");
    return rep;
  }
  if (it.legs.front().from != q.origin) rep.fail("first leg does not start at origin");
  if (it.legs.back().to != q.dest) rep.fail("last leg does not end at destination");

  Mode cur = Mode::Walk;
  double soc = 0.0;  // meaningful only while cur is a vehicle mode
  NodeId at = q.origin;
  int idx = 0;
  for (const Leg& l : it.legs) {
    if (l.from != at) {
      rep.fail(fmt("leg %d starts at node %d, expected %d", idx, l.from, at));
      at = l.from;
    }
    if (l.kind == Leg::Kind::Switch) {
      if (l.to != l.from) rep.fail(fmt("leg %d: switch must stay in place", idx));
      if (l.mode != cur) rep.fail(fmt("leg %d: switch leaves mode not in use", idx));
      if (l.next_mode == l.mode) rep.fail(fmt("leg %d: switch to same mode", idx));
      const EHub* hub = hubs.find(l.from);
      auto fee = [&]() -> std::optional<double> {
        if (l.next_mode == l.mode) return std::nullopt;
        return transition_cost(q.transitions, hub, l.mode, l.next_mode);
      }();
      if (!fee.has_value()) {
        rep.fail(fmt("leg %d: transition not admissible at node %d", idx, l.from));
      } else if (!close(*fee, l.seconds)) {
        rep.fail(fmt("leg %d: switch fee %.12g, expected %.12g", idx, l.seconds, *fee));
      }
      if (l.next_mode != Mode::Walk && !q.prefs.usable(l.next_mode)) {
        rep.fail(fmt("leg %d: picks up excluded mode %s", idx, mode_name(l.next_mode)));
      }
      if (l.next_mode != Mode::Walk && hub != nullptr) soc = hub->best_soc(l.next_mode);
      cur = l.next_mode;
      ++rep.transitions;
    } else {
      if (l.mode != cur) rep.fail(fmt("leg %d: moves in mode not in use", idx));
      if (!q.prefs.usable(l.mode)) {
        rep.fail(fmt("leg %d: moves in excluded mode %s", idx, mode_name(l.mode)));
      }
      const Arc* arc = g.find_arc(l.from, l.to);
      if (arc == nullptr) {
        rep.fail(fmt("leg %d: no arc %d -> %d", idx, l.from, l.to));
      } else {
        if (!arc->permits(l.mode)) {
          rep.fail(fmt("leg %d: arc %d -> %d closed to %s", idx, l.from, l.to,
                       mode_name(l.mode)));
        } else {
          double want = travel_cost(q.prefs, arc->distance_m, arc->speed(l.mode), l.mode);
          if (!close(want, l.seconds)) {
            rep.fail(fmt("leg %d: cost %.12g, expected %.12g", idx, l.seconds, want));
          }
        }
        if (!close(arc->distance_m, l.distance_m)) {
          rep.fail(fmt("leg %d: distance %.12g, expected %.12g", idx, l.distance_m,
                       arc->distance_m));
        }
        if (l.mode != Mode::Walk) {
          double burn = q.energy.rho(l.mode) * arc->distance_m;
          if (!close(burn, l.wh_consumed)) {
            rep.fail(fmt("leg %d: consumption %.12g, expected %.12g", idx, l.wh_consumed,
                         burn));
          }
          soc -= burn;
          if (soc < -1e-9) rep.fail(fmt("leg %d: state of charge %.12g below zero", idx, soc));
        } else if (l.wh_consumed != 0.0) {
          rep.fail(fmt("leg %d: walking reports consumption", idx));
        }
      }
      at = l.to;
    }
    rep.total_seconds += l.seconds;
    ++idx;
  }

  if (rep.transitions > q.prefs.t_max) {
    rep.fail(fmt("%d transitions exceed budget %d", rep.transitions, q.prefs.t_max));
  }
  if (!can_end_in(cur, q.dest, hubs)) {
    rep.fail(fmt("journey ends in %s with nowhere to dock", mode_name(cur)));
  }
  if (!close(rep.total_seconds, it.total_seconds)) {
    rep.fail(fmt("stated total %.12g, recomputed %.12g", it.total_seconds,
                 rep.total_seconds));
  }
  if (rep.transitions != it.transitions) {
    rep.fail(fmt("stated %d transitions, recomputed %d", it.transitions,
                 rep.transitions));
  }
  return rep;
}

}  // namespace emob
