#include "emob/cost.hpp"

#include <cmath>
#include <string>

namespace emob {

void UserPreferences::validate() const {
  for (Mode m : kAllModes) {
    double a = alpha[mode_index(m)];
    if (!(a >= 1.0) || !std::isfinite(a)) {
      throw NonPositiveInputError("alpha for " + std::string(mode_name(m)) +
                                  " must be finite and >= 1");
    }
  }
  if (excluded[mode_index(Mode::Walk)]) {
    throw std::invalid_argument("walk cannot be excluded");
  }
  if (t_max < 0) throw std::invalid_argument("t_max must be >= 0");
}

void EnergyParams::validate() const {
  if (rho_wh_per_m[mode_index(Mode::Walk)] != 0.0) {
    throw std::invalid_argument("walk consumption must be zero");
  }
  for (Mode m : kVehicleModes) {
    double r = rho_wh_per_m[mode_index(m)];
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("consumption rate for " + std::string(mode_name(m)) +
                                  " must be finite and >= 0");
    }
  }
}

void TransitionCostTable::set_all(double v) {
  for (int i = 0; i < kNumModes; ++i)
    for (int j = 0; j < kNumModes; ++j)
      if (i != j) cost_s[i][j] = v;
}

void TransitionCostTable::validate() const {
  for (int i = 0; i < kNumModes; ++i) {
    if (cost_s[i][i] != 0.0) {
      throw std::invalid_argument("diagonal transition costs must be zero");
    }
    for (int j = 0; j < kNumModes; ++j) {
      double c = cost_s[i][j];
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("transition costs must be finite and >= 0");
      }
    }
  }
}

double travel_cost(const UserPreferences& prefs, double distance_m, double speed_mps,
                   Mode mode) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw NonPositiveInputError("distance must be positive");
  }
  if (!(speed_mps > 0.0) || !std::isfinite(speed_mps)) {
    throw NonPositiveInputError("speed must be positive");
  }
  return prefs.effective_alpha(mode) * distance_m / speed_mps;
}

std::optional<double> transition_cost(const TransitionCostTable& table, const EHub* hub,
                                      Mode s, Mode s_prime) {
  if (s == s_prime) throw SameModePairError("transition requires two distinct modes");
  if (hub == nullptr) return std::nullopt;
  if (s != Mode::Walk && !hub->supports(s)) return std::nullopt;
  if (s_prime != Mode::Walk && !hub->supports(s_prime)) return std::nullopt;
  return table.get(s, s_prime);
}

std::optional<double> energy_after_edge(const EnergyParams& energy, double soc_wh,
                                        Mode mode, double distance_m) {
  if (mode == Mode::Walk) return soc_wh;
  double after = soc_wh - energy.rho(mode) * distance_m;
  if (after < 0.0) return std::nullopt;
  return after;
}

bool can_end_in(Mode mode, NodeId node, const HubRegistry& hubs) {
  if (mode == Mode::Walk) return true;
  const EHub* hub = hubs.find(node);
  return hub != nullptr && hub->supports(mode);
}

void Query::validate(const MultiModalGraph& g) const {
  if (!g.has_node(origin)) throw UnknownNodeError("origin node does not exist");
  if (!g.has_node(dest)) throw UnknownNodeError("destination node does not exist");
  if (origin == dest) throw std::invalid_argument("origin equals destination");
  prefs.validate();
  energy.validate();
  transitions.validate();
}

}  // namespace emob
