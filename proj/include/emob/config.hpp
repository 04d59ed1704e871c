#pragma once

#include <string>

#include "emob/cost.hpp"

namespace emob {

struct QueryConfig {
  UserPreferences prefs;
  EnergyParams energy;
  TransitionCostTable transitions;
};

// Structured-text config with keys alpha, excluded, t_max, rho_wh_per_m and
// transition_cost_s ("walk->ecar": seconds). Every key is optional; absent
// keys keep their defaults. Throws ParseError on malformed input.
QueryConfig load_query_config(const std::string& path);
QueryConfig query_config_from_string(const std::string& text, const std::string& source);
void save_query_config(const QueryConfig& cfg, const std::string& path);
std::string query_config_to_string(const QueryConfig& cfg);

}  // namespace emob
