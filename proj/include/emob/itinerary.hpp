#pragma once

#include <string>
#include <vector>

#include "emob/cost.hpp"
#include "emob/graph.hpp"
#include "emob/mode.hpp"

namespace emob {

// A journey is a chain of legs. Move legs traverse one arc in one mode;
// Switch legs change mode in place at a hub and count against the
// transition budget.
struct Leg {
  enum class Kind { Move, Switch };

  Kind kind = Kind::Move;
  NodeId from = 0;
  NodeId to = 0;        // == from for Switch
  Mode mode = Mode::Walk;       // travel mode; for Switch, the mode given up
  Mode next_mode = Mode::Walk;  // == mode for Move; the mode picked up for Switch
  double distance_m = 0.0;      // 0 for Switch
  double seconds = 0.0;         // preference-weighted time for Move, switch fee for Switch
  double wh_consumed = 0.0;     // 0 for Switch and for walking

  static Leg move(NodeId from, NodeId to, Mode mode, double distance_m, double seconds,
                  double wh_consumed);
  static Leg mode_switch(NodeId at, Mode from_mode, Mode to_mode, double seconds);
};

struct Itinerary {
  std::vector<Leg> legs;
  double total_seconds = 0.0;
  int transitions = 0;

  // Totals are summed front to back so independently built itineraries with
  // identical legs report bit-identical objectives.
  static Itinerary from_legs(std::vector<Leg> legs);

  bool empty() const { return legs.empty(); }
  std::vector<Mode> modes_used() const;
};

std::string explain(const Itinerary& it);

struct ResimulationReport {
  bool ok = true;
  std::vector<std::string> violations;
  double total_seconds = 0.0;
  int transitions = 0;

  void fail(std::string msg);
};

// Replays an itinerary against the raw graph, hubs and query constraints,
// recomputing every cost and state-of-charge step from scratch. Used as an
// independent check on solver output.
ResimulationReport resimulate(const MultiModalGraph& g, const HubRegistry& hubs,
                              const Query& q, const Itinerary& it);

}  // namespace emob
