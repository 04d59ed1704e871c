#include "emob/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "emob/dijkstra.hpp"
#include "emob/mode.hpp"
#include "emob/reduction.hpp"

namespace emob {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kStatusNames[] = {"optimal",     "infeasible", "unreachable",
                                        "no_walk_hub", "node_limit", "time_limit",
                                        "error"};

bool known_status(const std::string& s) {
  for (const char* n : kStatusNames)
    if (s == n) return true;
  return false;
}

bool known_method(const std::string& m) {
  for (const char* n : kMethodNames)
    if (m == n) return true;
  return false;
}

std::string num(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
  }
};

Mode parse_mode(const std::string& name, const std::string& source) {
  auto m = mode_from_name(name);
  if (!m.has_value()) throw ConfigError(source + ": unknown mode '" + name + "'");
  return *m;
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double pos = p * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (pos - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string cell_name(const std::string& method, int k, const std::string& pref,
                      double mult) {
  return method + "_k" + std::to_string(k) + "_" + pref + "_soc" + num(mult);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!scenario_file.empty() && !hub_counts.empty())
    throw ConfigError("scenario_file fixes the hub set; hub_counts must be empty");
  if (scenario_file.empty()) {
    if (hub_counts.empty()) throw ConfigError("hub_counts must not be empty");
    std::set<int> seen;
    for (int k : hub_counts) {
      if (k < 0) throw ConfigError("hub counts must be >= 0");
      if (k > scenario.n_nodes)
        throw ConfigError("hub count exceeds the scenario node count");
      if (!seen.insert(k).second) throw ConfigError("duplicate hub count");
    }
  }
  if (n_od_pairs < 1) throw ConfigError("n_od_pairs must be >= 1");
  if (!(min_od_walk_m >= 0.0)) throw ConfigError("min_od_walk_m must be >= 0");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  {
    std::set<std::string> seen;
    for (const std::string& m : methods) {
      if (!known_method(m)) throw ConfigError("unknown method '" + m + "'");
      if (!seen.insert(m).second) throw ConfigError("duplicate method '" + m + "'");
    }
  }
  if (preference_sets.empty()) throw ConfigError("preference_sets must not be empty");
  {
    std::set<std::string> seen;
    for (const PreferenceSet& ps : preference_sets) {
      if (ps.name.empty()) throw ConfigError("preference set names must not be empty");
      for (char c : ps.name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        if (!ok)
          throw ConfigError("preference set name '" + ps.name +
                            "' must use only letters, digits, '-', '_' or '.'");
      }
      if (!seen.insert(ps.name).second)
        throw ConfigError("duplicate preference set '" + ps.name + "'");
      try {
        ps.prefs.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError("preference set '" + ps.name + "': " + e.what());
      }
    }
  }
  if (soc_sweep.empty()) throw ConfigError("soc_sweep must not be empty");
  {
    std::set<double> seen;
    for (double m : soc_sweep) {
      if (!std::isfinite(m) || m < 0.0)
        throw ConfigError("soc multipliers must be finite and >= 0");
      if (!seen.insert(m).second) throw ConfigError("duplicate soc multiplier");
    }
  }
  if (!(energy_quantum_wh > 0.0)) throw ConfigError("energy_quantum_wh must be > 0");
  if (milp_limits.max_bb_nodes < 1) throw ConfigError("max_bb_nodes must be >= 1");
  if (milp_limits.time_ms < 0) throw ConfigError("time_ms must be >= 0");
}

namespace {

ScenarioSpec scenario_from_json(const json& j, const std::string& source) {
  static const std::set<std::string> known = {"name",        "n_nodes",
                                              "topology",    "grid_cols",
                                              "target_avg_degree", "hub_placement",
                                              "seed"};
  for (const auto& item : j.items()) {
    if (item.key() == "k_hubs")
      throw ConfigError(source + ": k_hubs is set per cell by hub_counts");
    if (!known.count(item.key()))
      throw ConfigError(source + ": unknown scenario key '" + item.key() + "'");
  }
  ScenarioSpec spec;
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (j.contains("n_nodes")) spec.n_nodes = j.at("n_nodes").get<int>();
  if (j.contains("topology")) {
    std::string t = j.at("topology").get<std::string>();
    if (t == "grid")
      spec.topology = Topology::Grid;
    else if (t == "random-geometric")
      spec.topology = Topology::RandomGeometric;
    else
      throw ConfigError(source + ": unknown topology '" + t + "'");
  }
  if (j.contains("grid_cols")) spec.grid_cols = j.at("grid_cols").get<int>();
  if (j.contains("target_avg_degree"))
    spec.target_avg_degree = j.at("target_avg_degree").get<double>();
  if (j.contains("hub_placement")) {
    std::string p = j.at("hub_placement").get<std::string>();
    if (p == "uniform-random")
      spec.hub_placement = HubPlacement::UniformRandom;
    else if (p == "degree-weighted")
      spec.hub_placement = HubPlacement::DegreeWeighted;
    else
      throw ConfigError(source + ": unknown hub_placement '" + p + "'");
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

PreferenceSet preference_set_from_json(const json& j, const std::string& source) {
  static const std::set<std::string> known = {"name", "alpha", "exclude",
                                              "soft_exclusion", "t_max"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ConfigError(source + ": unknown preference key '" + item.key() + "'");
  if (!j.contains("name"))
    throw ConfigError(source + ": every preference set needs a name");
  PreferenceSet ps;
  ps.name = j.at("name").get<std::string>();
  if (j.contains("alpha"))
    for (const auto& item : j.at("alpha").items()) {
      Mode m = parse_mode(item.key(), source);
      ps.prefs.alpha[mode_index(m)] = item.value().get<double>();
    }
  if (j.contains("exclude"))
    for (const json& e : j.at("exclude")) {
      Mode m = parse_mode(e.get<std::string>(), source);
      ps.prefs.excluded[mode_index(m)] = true;
    }
  if (j.contains("soft_exclusion"))
    ps.prefs.soft_exclusion = j.at("soft_exclusion").get<bool>();
  if (j.contains("t_max")) ps.prefs.t_max = j.at("t_max").get<int>();
  return ps;
}

}  // namespace

ExperimentConfig config_from_string(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": config must be a JSON object");
  static const std::set<std::string> known = {
      "scenario",  "scenario_file", "hub_counts",        "n_od_pairs",
      "min_od_walk_m", "od_seed",   "methods",           "preference_sets",
      "soc_sweep", "energy_quantum_wh", "milp"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ConfigError(source + ": unknown key '" + item.key() + "'");
  ExperimentConfig cfg;
  try {
    if (j.contains("scenario")) cfg.scenario = scenario_from_json(j.at("scenario"), source);
    if (j.contains("scenario_file")) {
      cfg.scenario_file = j.at("scenario_file").get<std::string>();
      cfg.hub_counts.clear();
    }
    if (j.contains("hub_counts")) cfg.hub_counts = j.at("hub_counts").get<std::vector<int>>();
    if (j.contains("n_od_pairs")) cfg.n_od_pairs = j.at("n_od_pairs").get<int>();
    if (j.contains("min_od_walk_m"))
      cfg.min_od_walk_m = j.at("min_od_walk_m").get<double>();
    if (j.contains("od_seed")) cfg.od_seed = j.at("od_seed").get<std::uint64_t>();
    if (j.contains("methods"))
      cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("preference_sets")) {
      cfg.preference_sets.clear();
      for (const json& p : j.at("preference_sets"))
        cfg.preference_sets.push_back(preference_set_from_json(p, source));
    }
    if (j.contains("soc_sweep"))
      cfg.soc_sweep = j.at("soc_sweep").get<std::vector<double>>();
    if (j.contains("energy_quantum_wh"))
      cfg.energy_quantum_wh = j.at("energy_quantum_wh").get<double>();
    if (j.contains("milp")) {
      const json& m = j.at("milp");
      for (const auto& item : m.items())
        if (item.key() != "max_bb_nodes" && item.key() != "time_ms")
          throw ConfigError(source + ": unknown milp key '" + item.key() + "'");
      if (m.contains("max_bb_nodes"))
        cfg.milp_limits.max_bb_nodes = m.at("max_bb_nodes").get<long>();
      if (m.contains("time_ms")) cfg.milp_limits.time_ms = m.at("time_ms").get<long>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_string(buf.str(), path);
}

HubRegistry scale_soc(const HubRegistry& hubs, double mult) {
  if (!std::isfinite(mult) || mult < 0.0)
    throw std::invalid_argument("soc multiplier must be finite and >= 0");
  std::vector<EHub> scaled = hubs.hubs();
  for (EHub& h : scaled)
    for (Mode m : kAllModes)
      if (h.supports(m)) h.best_soc_wh[mode_index(m)] *= mult;
  return HubRegistry(std::move(scaled));
}

std::string mode_set_label(const Itinerary& it) {
  std::set<std::string> names;
  for (Mode m : it.modes_used()) names.insert(mode_name(m));
  std::string out;
  for (const std::string& n : names) {
    if (!out.empty()) out += '+';
    out += n;
  }
  return out;
}

RouteOutcome run_method(const std::string& method, const MultiModalGraph& g,
                        const HubRegistry& hubs, const Query& q,
                        const MilpLimits& limits, double energy_quantum_wh) {
  if (!known_method(method)) throw std::invalid_argument("unknown method: " + method);
  RouteOutcome out;
  out.objective_s = std::numeric_limits<double>::quiet_NaN();
  try {
    if (method == "dijkstra" || method == "dijkstra-exact") {
      Timer t;
      std::optional<Itinerary> it =
          method == "dijkstra" ? route_dijkstra(g, hubs, q)
                               : route_exact(g, hubs, q, energy_quantum_wh);
      out.wall_ms = t.ms();
      if (it) {
        out.status = "optimal";
        out.objective_s = it->total_seconds;
        out.itinerary = std::move(it);
      } else if (method == "dijkstra-exact") {
        // The exhaustive search walks everywhere walking goes, so an empty
        // answer means the destination is off the walk network entirely.
        out.status = "unreachable";
      } else {
        // The label heuristic prunes per node and can discard the only
        // journeys that dock legally; its empty answer is a verdict of the
        // method, not of the graph.
        out.status = "infeasible";
      }
    } else if (method == "milp") {
      Timer build;
      MilpModel mm = build_model(g, hubs, q);
      out.build_ms = build.ms();
      MilpResult res = solve(mm, limits);
      out.wall_ms = res.stats.wall_ms;
      switch (res.status) {
        case MilpStatus::Optimal:
          out.status = "optimal";
          out.objective_s = res.objective;
          out.itinerary = extract_itinerary(res, mm, q);
          break;
        case MilpStatus::Infeasible: out.status = "infeasible"; break;
        case MilpStatus::NodeLimit: out.status = "node_limit"; break;
        case MilpStatus::TimeLimit: out.status = "time_limit"; break;
      }
    } else {  // milp-reduced
      Timer build;
      Reduction red = reduce(g, hubs, q.origin, q.dest, q.prefs, q.energy);
      MilpModel mm = build_reduced_model(red.graph, q);
      out.build_ms = build.ms();
      MilpResult res = solve(mm, limits);
      out.wall_ms = res.stats.wall_ms;
      switch (res.status) {
        case MilpStatus::Optimal: {
          out.status = "optimal";
          out.objective_s = res.objective;
          Query rq = q;
          rq.origin = red.graph.origin;
          rq.dest = red.graph.destination;
          out.itinerary = expand_itinerary(extract_itinerary(res, mm, rq), red.expansion);
          break;
        }
        case MilpStatus::Infeasible: out.status = "infeasible"; break;
        case MilpStatus::NodeLimit: out.status = "node_limit"; break;
        case MilpStatus::TimeLimit: out.status = "time_limit"; break;
      }
    }
  } catch (const UnreachableDestination&) {
    out.status = "unreachable";
  } catch (const NoWalkPathToAnyHub&) {
    out.status = "no_walk_hub";
  } catch (const std::exception&) {
    out.status = "error";
  }
  return out;
}

namespace {

struct CellStats {
  std::vector<double> wall_ms;
  std::vector<double> build_ms;
  std::vector<double> objectives;  // optimal rows only
  std::map<std::string, int> status_count;
  std::map<std::string, int> mode_count;  // optimal rows only
  int walk_only = 0;
};

std::string make_summary(const ExperimentConfig& cfg, const std::string& scenario_name,
                         int n_nodes, const std::vector<std::string>& cell_order,
                         const std::map<std::string, CellStats>& cells) {
  std::ostringstream os;
  os << "scenario " << scenario_name << ": " << n_nodes << " nodes, " << cfg.n_od_pairs
     << " od pairs (seed " << cfg.od_seed << ")\n";
  os << "wall_ms covers the solve call only; model build and hub collapse are "
        "reported as build_ms\n";
  for (const std::string& id : cell_order) {
    const CellStats& st = cells.at(id);
    os << id << ": n=" << st.wall_ms.size();
    os << " statuses{";
    bool first = true;
    for (const char* name : kStatusNames) {
      auto it = st.status_count.find(name);
      if (it == st.status_count.end()) continue;
      if (!first) os << ",";
      os << name << ":" << it->second;
      first = false;
    }
    os << "}";
    os << " build_ms_mean=" << fixed(mean(st.build_ms), 3);
    os << " wall_ms{mean=" << fixed(mean(st.wall_ms), 3)
       << ",median=" << fixed(percentile(st.wall_ms, 0.5), 3)
       << ",q1=" << fixed(percentile(st.wall_ms, 0.25), 3)
       << ",q3=" << fixed(percentile(st.wall_ms, 0.75), 3) << "}";
    if (!st.objectives.empty()) {
      os << " objective_mean=" << fixed(mean(st.objectives), 3);
      os << " walk_only="
         << fixed(static_cast<double>(st.walk_only) /
                      static_cast<double>(st.objectives.size()),
                  4);
      os << " modes{";
      bool m_first = true;
      for (const auto& [label, count] : st.mode_count) {
        if (!m_first) os << ",";
        os << label << ":" << count;
        m_first = false;
      }
      os << "}";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<int> ks;
  std::vector<Scenario> scenarios;
  if (!cfg.scenario_file.empty()) {
    scenarios.push_back(load_scenario(cfg.scenario_file));
    ks.push_back(scenarios.back().hubs.k());
  } else {
    for (int k : cfg.hub_counts) {
      ScenarioSpec spec = cfg.scenario;
      spec.k_hubs = k;
      scenarios.push_back(generate(spec));
      ks.push_back(k);
    }
  }
  // One batch answered by every cell, so rows differ only in the knob under
  // study.
  ODSet od =
      sample_od_pairs(scenarios.front().graph, cfg.n_od_pairs, cfg.min_od_walk_m,
                      cfg.od_seed);

  std::vector<MetricsRow> rows;
  std::vector<std::string> cell_order;
  std::map<std::string, CellStats> cells;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const Scenario& scen = scenarios[ki];
    for (const PreferenceSet& ps : cfg.preference_sets) {
      for (double mult : cfg.soc_sweep) {
        HubRegistry hubs = scale_soc(scen.hubs, mult);
        for (const std::string& method : cfg.methods) {
          std::string id = cell_name(method, ks[ki], ps.name, mult);
          cell_order.push_back(id);
          CellStats& st = cells[id];
          for (std::size_t i = 0; i < od.pairs.size(); ++i) {
            Query q;
            q.origin = od.pairs[i].first;
            q.dest = od.pairs[i].second;
            q.prefs = ps.prefs;
            RouteOutcome oc = run_method(method, scen.graph, hubs, q, cfg.milp_limits,
                                         cfg.energy_quantum_wh);
            MetricsRow row;
            row.cell_id = id;
            row.method = method;
            row.k_hubs = ks[ki];
            row.pref_set = ps.name;
            row.soc_mult = mult;
            row.od_index = static_cast<int>(i);
            row.status = oc.status;
            row.objective_s = oc.objective_s;
            row.wall_ms = oc.wall_ms;
            if (oc.itinerary) {
              row.modes = mode_set_label(*oc.itinerary);
              row.transitions = oc.itinerary->transitions;
            }
            st.wall_ms.push_back(row.wall_ms);
            st.build_ms.push_back(oc.build_ms);
            ++st.status_count[row.status];
            if (row.status == "optimal") {
              st.objectives.push_back(row.objective_s);
              ++st.mode_count[row.modes];
              if (row.modes == "walk") ++st.walk_only;
            }
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  ExperimentResult out;
  out.summary = make_summary(cfg, scenarios.front().name,
                             scenarios.front().graph.num_nodes(), cell_order, cells);
  out.rows = std::move(rows);
  return out;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const MetricsRow& r : rows) {
    out += r.cell_id;
    out += ',';
    out += r.method;
    out += ',';
    out += std::to_string(r.k_hubs);
    out += ',';
    out += r.pref_set;
    out += ',';
    out += num(r.soc_mult);
    out += ',';
    out += std::to_string(r.od_index);
    out += ',';
    out += r.status;
    out += ',';
    if (!std::isnan(r.objective_s)) out += num(r.objective_s);
    out += ',';
    out += num(r.wall_ms);
    out += ',';
    out += r.modes;
    out += ',';
    out += std::to_string(r.transitions);
    out += '\n';
  }
  return out;
}

namespace {

int parse_int(const std::string& field, const std::string& source, int line_no,
              const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size())
    throw ParseError(source + ":" + std::to_string(line_no) + ": bad " + what + " '" +
                     field + "'");
  return v;
}

double parse_double(const std::string& field, const std::string& source, int line_no,
                    const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size())
    throw ParseError(source + ":" + std::to_string(line_no) + ": bad " + what + " '" +
                     field + "'");
  return v;
}

}  // namespace

std::vector<MetricsRow> metrics_from_csv(const std::string& text,
                                         const std::string& source) {
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kMetricsHeader)
    throw ParseError(source + ":1: expected metrics header");
  std::vector<MetricsRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 11)
      throw ParseError(source + ":" + std::to_string(line_no) +
                       ": expected 11 fields, got " + std::to_string(f.size()));
    MetricsRow r;
    r.cell_id = f[0];
    r.method = f[1];
    r.k_hubs = parse_int(f[2], source, line_no, "k_hubs");
    r.pref_set = f[3];
    r.soc_mult = parse_double(f[4], source, line_no, "soc_mult");
    r.od_index = parse_int(f[5], source, line_no, "od_index");
    r.status = f[6];
    if (!known_status(r.status))
      throw ParseError(source + ":" + std::to_string(line_no) + ": unknown status '" +
                       r.status + "'");
    r.objective_s = f[7].empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : parse_double(f[7], source, line_no, "objective_s");
    r.wall_ms = parse_double(f[8], source, line_no, "wall_ms");
    r.modes = f[9];
    r.transitions = parse_int(f[10], source, line_no, "transitions");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsRow> load_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return metrics_from_csv(buf.str(), path);
}

std::string SpeedupReport::text() const {
  std::ostringstream os;
  os << "hub collapse speedup, milp vs milp-reduced\n";
  for (const SpeedupCell& c : cells) {
    os << "k=" << c.k_hubs << ": milp mean " << fixed(c.mean_wall_full_ms, 3)
       << " ms, milp-reduced mean " << fixed(c.mean_wall_reduced_ms, 3) << " ms, ratio "
       << fixed(c.ratio, 2);
    if (c.gaps.empty()) {
      os << ", no matched optima";
    } else {
      double worst = 0.0;
      for (double g : c.gaps) worst = std::max(worst, g);
      os << ", objective gap mean=" << num(mean(c.gaps)) << " max=" << num(worst)
         << " over " << c.gaps.size() << " matched optima";
    }
    os << "\n";
  }
  if (crossover_k < 0)
    os << "crossover: none within the tested hub counts\n";
  else
    os << "crossover: k=" << crossover_k << "\n";
  return os.str();
}

SpeedupReport compare_methods(const std::vector<MetricsRow>& rows) {
  using QueryKey = std::tuple<int, std::string, double, int>;
  std::map<int, std::vector<double>> wall_full, wall_reduced;
  std::map<QueryKey, double> obj_full;
  std::map<QueryKey, double> obj_reduced;
  for (const MetricsRow& r : rows) {
    if (r.method != "milp" && r.method != "milp-reduced") continue;
    QueryKey key{r.k_hubs, r.pref_set, r.soc_mult, r.od_index};
    if (r.method == "milp") {
      wall_full[r.k_hubs].push_back(r.wall_ms);
      if (r.status == "optimal") obj_full[key] = r.objective_s;
    } else {
      wall_reduced[r.k_hubs].push_back(r.wall_ms);
      if (r.status == "optimal") obj_reduced[key] = r.objective_s;
    }
  }
  std::set<int> all_ks;
  for (const auto& [k, v] : wall_full) all_ks.insert(k);
  for (const auto& [k, v] : wall_reduced) all_ks.insert(k);
  if (all_ks.empty()) throw MissingCell("no milp or milp-reduced rows to compare");
  SpeedupReport rep;
  for (int k : all_ks) {
    if (!wall_full.count(k))
      throw MissingCell("k=" + std::to_string(k) + " has no milp rows");
    if (!wall_reduced.count(k))
      throw MissingCell("k=" + std::to_string(k) + " has no milp-reduced rows");
    SpeedupCell cell;
    cell.k_hubs = k;
    cell.mean_wall_full_ms = mean(wall_full[k]);
    cell.mean_wall_reduced_ms = mean(wall_reduced[k]);
    cell.ratio = cell.mean_wall_full_ms / cell.mean_wall_reduced_ms;
    for (const auto& [key, obj] : obj_reduced) {
      if (std::get<0>(key) != k) continue;
      auto it = obj_full.find(key);
      if (it != obj_full.end()) cell.gaps.push_back(obj - it->second);
    }
    rep.cells.push_back(std::move(cell));
  }
  for (const SpeedupCell& c : rep.cells) {
    if (c.ratio <= 1.0) {
      rep.crossover_k = c.k_hubs;
      break;
    }
  }
  return rep;
}

std::string SocReport::text() const {
  std::ostringstream os;
  os << "mean optimal objective by charge multiplier\n";
  for (const SocCurve& c : curves) {
    os << c.pref_set << ":";
    for (std::size_t i = 0; i < c.soc_mult.size(); ++i) {
      os << (i == 0 ? " " : "; ") << num(c.soc_mult[i]) << " -> "
         << fixed(c.mean_objective[i], 3);
    }
    os << (c.non_increasing ? " [non-increasing]" : " [increases along the sweep]");
    os << "\n";
  }
  return os.str();
}

SocReport soc_sweep_report(const std::vector<MetricsRow>& rows) {
  std::vector<std::string> pref_order;
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  std::set<double> grid;
  for (const MetricsRow& r : rows) {
    if (!acc.count(r.pref_set)) pref_order.push_back(r.pref_set);
    auto& cell = acc[r.pref_set][r.soc_mult];
    grid.insert(r.soc_mult);
    if (r.status == "optimal") {
      cell.first += r.objective_s;
      cell.second += 1;
    }
  }
  if (grid.empty()) throw MissingCell("no rows to build a soc report from");
  SocReport rep;
  for (const std::string& pref : pref_order) {
    SocCurve curve;
    curve.pref_set = pref;
    for (double m : grid) {
      auto it = acc[pref].find(m);
      if (it == acc[pref].end())
        throw MissingCell("preference set '" + pref + "' has no rows at soc multiplier " +
                          num(m));
      if (it->second.second == 0)
        throw MissingCell("preference set '" + pref +
                          "' has no optimal rows at soc multiplier " + num(m));
      curve.soc_mult.push_back(m);
      curve.mean_objective.push_back(it->second.first /
                                     static_cast<double>(it->second.second));
    }
    curve.non_increasing = true;
    for (std::size_t i = 1; i < curve.mean_objective.size(); ++i) {
      double prev = curve.mean_objective[i - 1];
      if (curve.mean_objective[i] > prev + 1e-9 * std::max(1.0, std::fabs(prev))) {
        curve.non_increasing = false;
        break;
      }
    }
    rep.curves.push_back(std::move(curve));
  }
  return rep;
}

}  // namespace emob
