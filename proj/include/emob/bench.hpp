#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emob/cost.hpp"
#include "emob/graph.hpp"
#include "emob/itinerary.hpp"
#include "emob/milp.hpp"
#include "emob/scenario.hpp"

namespace emob {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A report was asked for a grid cell the metrics do not contain.
class MissingCell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PreferenceSet {
  std::string name;
  UserPreferences prefs;
};

// One experiment grid: method x hub count x preference set x charge
// multiplier, every cell answering the same origin/destination batch.
struct ExperimentConfig {
  ScenarioSpec scenario;
  std::string scenario_file;  // when set, replaces generation; hub_counts must be empty
  std::vector<int> hub_counts = {10, 20};
  int n_od_pairs = 20;
  double min_od_walk_m = 300.0;
  std::uint64_t od_seed = 1;
  std::vector<std::string> methods = {"dijkstra", "milp"};
  std::vector<PreferenceSet> preference_sets = {{"default", {}}};
  std::vector<double> soc_sweep = {1.0};
  double energy_quantum_wh = 0.1;  // dijkstra-exact only
  MilpLimits milp_limits;

  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_string(const std::string& text, const std::string& source);
ExperimentConfig load_config(const std::string& path);

struct MetricsRow {
  std::string cell_id;
  std::string method;
  int k_hubs = 0;
  std::string pref_set;
  double soc_mult = 1.0;
  int od_index = 0;
  std::string status;       // optimal | infeasible | unreachable | no_walk_hub |
                            // node_limit | time_limit | error
  double objective_s = 0.0;  // NaN unless an optimum was returned
  double wall_ms = 0.0;
  std::string modes;  // distinct modes used, sorted and '+'-joined
  int transitions = 0;
};

inline constexpr const char* kMetricsHeader =
    "cell_id,method,k_hubs,pref_set,soc_mult,od_index,status,objective_s,wall_ms,"
    "modes,transitions";

std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> metrics_from_csv(const std::string& text,
                                         const std::string& source);
std::vector<MetricsRow> load_metrics(const std::string& path);

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::string summary;
};

// Runs the full grid sequentially. The origin/destination batch is sampled
// once and reused by every cell; a failing query becomes a status row and
// never aborts the grid. Wall times cover the solve call only; model build
// and hub collapse are kept outside and reported in the summary.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// One query through one method. `build_ms` holds model construction or hub
// collapse; `wall_ms` the solve alone. For milp-reduced the itinerary comes
// back expanded to full resolution.
struct RouteOutcome {
  std::string status;
  double objective_s = 0.0;  // NaN unless optimal
  std::optional<Itinerary> itinerary;
  double wall_ms = 0.0;
  double build_ms = 0.0;
};

inline constexpr const char* kMethodNames[] = {"dijkstra", "dijkstra-exact", "milp",
                                               "milp-reduced"};

RouteOutcome run_method(const std::string& method, const MultiModalGraph& g,
                        const HubRegistry& hubs, const Query& q,
                        const MilpLimits& limits = {},
                        double energy_quantum_wh = 0.1);

// Hub registry with every stocked charge scaled by `mult` (>= 0).
HubRegistry scale_soc(const HubRegistry& hubs, double mult);

// Distinct modes of the itinerary, lexicographically sorted and '+'-joined;
// "walk" for walk-only journeys.
std::string mode_set_label(const Itinerary& it);

struct SpeedupCell {
  int k_hubs = 0;
  double mean_wall_full_ms = 0.0;
  double mean_wall_reduced_ms = 0.0;
  double ratio = 0.0;  // full / reduced; > 1 means the collapse helped
  std::vector<double> gaps;  // reduced - full objective, matched queries
};

struct SpeedupReport {
  std::vector<SpeedupCell> cells;  // ascending hub count
  int crossover_k = -1;            // first k where the collapse stops helping
  std::string text() const;
};

// Pairs milp against milp-reduced per hub count. Throws MissingCell when one
// side of a hub count is absent.
SpeedupReport compare_methods(const std::vector<MetricsRow>& rows);

struct SocCurve {
  std::string pref_set;
  std::vector<double> soc_mult;        // ascending
  std::vector<double> mean_objective;  // aligned with soc_mult
  bool non_increasing = false;
};

struct SocReport {
  std::vector<SocCurve> curves;
  std::string text() const;
};

// Mean optimal objective per (preference set, charge multiplier). Every set
// must cover the full multiplier grid; gaps throw MissingCell.
SocReport soc_sweep_report(const std::vector<MetricsRow>& rows);

}  // namespace emob
