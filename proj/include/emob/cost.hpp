#pragma once

#include <optional>
#include <stdexcept>

#include "emob/graph.hpp"
#include "emob/mode.hpp"

namespace emob {

class NonPositiveInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SameModePairError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UserPreferences {
  // Multiplicative preference factor per mode, >= 1.
  PerMode<double> alpha = {1.0, 1.0, 1.0, 1.0};
  std::array<bool, kNumModes> excluded = {};
  // Soft exclusion keeps the mode available at a punitive alpha; hard
  // exclusion removes it from every candidate set. Hard is the default.
  bool soft_exclusion = false;
  int t_max = 2;

  static constexpr double kExclusionAlpha = 1e5;

  double effective_alpha(Mode m) const {
    if (excluded[mode_index(m)] && soft_exclusion) return kExclusionAlpha;
    return alpha[mode_index(m)];
  }

  bool usable(Mode m) const {
    return !(excluded[mode_index(m)] && !soft_exclusion);
  }

  void validate() const;
};

struct EnergyParams {
  // Wh per metre; indexed by mode, walk fixed at zero.
  PerMode<double> rho_wh_per_m = {0.0, 0.015, 0.01, 0.15};

  double rho(Mode m) const { return rho_wh_per_m[mode_index(m)]; }
  void validate() const;
};

struct TransitionCostTable {
  // Seconds charged for changing mode s -> s'. Applicability is resolved per
  // hub at query time; the table itself is keyed by the ordered mode pair.
  double cost_s[kNumModes][kNumModes] = {};

  double get(Mode s, Mode sp) const { return cost_s[mode_index(s)][mode_index(sp)]; }
  void set(Mode s, Mode sp, double v) { cost_s[mode_index(s)][mode_index(sp)] = v; }
  void set_all(double v);
  void validate() const;
};

// C = alpha_s * d / V^s. Throws NonPositiveInputError.
double travel_cost(const UserPreferences& prefs, double distance_m, double speed_mps,
                   Mode mode);

// Cost of switching s -> s' at the given node. `hub` is null when the node
// hosts no hub. nullopt means the transition is inadmissible there: changing
// mode always needs a hub, docking needs support for s, picking up needs
// support for s'. Throws SameModePairError when s == s'.
std::optional<double> transition_cost(const TransitionCostTable& table, const EHub* hub,
                                      Mode s, Mode s_prime);

// Battery step: soc - rho_s * d, nullopt when that would go negative.
// Walking leaves soc untouched.
std::optional<double> energy_after_edge(const EnergyParams& energy, double soc_wh,
                                        Mode mode, double distance_m);

// Arriving at the journey end in a vehicle is only allowed where the vehicle
// can be docked; otherwise the final leg must be Walk.
bool can_end_in(Mode mode, NodeId node, const HubRegistry& hubs);

struct Query {
  NodeId origin = 0;
  NodeId dest = 0;
  UserPreferences prefs;
  EnergyParams energy;
  TransitionCostTable transitions;

  void validate(const MultiModalGraph& g) const;
};

}  // namespace emob
