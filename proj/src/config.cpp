#include "emob/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "emob/scenario.hpp"

namespace emob {

namespace {

using json = nlohmann::ordered_json;

Mode parse_mode(const std::string& name, const std::string& where) {
  auto m = mode_from_name(name);
  if (!m.has_value()) throw ParseError(where + ": unknown mode '" + name + "'");
  return *m;
}

}  // namespace

QueryConfig query_config_from_string(const std::string& text,
                                     const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  QueryConfig cfg;
  try {
    if (auto it = j.find("alpha"); it != j.end()) {
      for (auto& [name, value] : it->items())
        cfg.prefs.alpha[mode_index(parse_mode(name, source + ".alpha"))] =
            value.get<double>();
    }
    if (auto it = j.find("excluded"); it != j.end()) {
      for (const json& name : *it)
        cfg.prefs.excluded[mode_index(
            parse_mode(name.get<std::string>(), source + ".excluded"))] = true;
    }
    if (auto it = j.find("soft_exclusion"); it != j.end())
      cfg.prefs.soft_exclusion = it->get<bool>();
    if (auto it = j.find("t_max"); it != j.end()) cfg.prefs.t_max = it->get<int>();
    if (auto it = j.find("rho_wh_per_m"); it != j.end()) {
      for (auto& [name, value] : it->items())
        cfg.energy.rho_wh_per_m[mode_index(parse_mode(name, source + ".rho_wh_per_m"))] =
            value.get<double>();
    }
    if (auto it = j.find("transition_cost_s"); it != j.end()) {
      for (auto& [pair_name, value] : it->items()) {
        auto sep = pair_name.find("->");
        if (sep == std::string::npos)
          throw ParseError(source + ".transition_cost_s: key '" + pair_name +
                           "' is not of the form 'walk->ecar'");
        Mode s = parse_mode(pair_name.substr(0, sep), source + ".transition_cost_s");
        Mode sp = parse_mode(pair_name.substr(sep + 2), source + ".transition_cost_s");
        if (s == sp)
          throw ParseError(source + ".transition_cost_s: key '" + pair_name +
                           "' pairs a mode with itself");
        cfg.transitions.set(s, sp, value.get<double>());
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  cfg.prefs.validate();
  cfg.energy.validate();
  cfg.transitions.validate();
  return cfg;
}

std::string query_config_to_string(const QueryConfig& cfg) {
  json j;
  json alpha;
  for (Mode m : kAllModes) alpha[mode_name(m)] = cfg.prefs.alpha[mode_index(m)];
  j["alpha"] = std::move(alpha);
  json excluded = json::array();
  for (Mode m : kAllModes)
    if (cfg.prefs.excluded[mode_index(m)]) excluded.push_back(mode_name(m));
  j["excluded"] = std::move(excluded);
  j["soft_exclusion"] = cfg.prefs.soft_exclusion;
  j["t_max"] = cfg.prefs.t_max;
  json rho;
  for (Mode m : kVehicleModes) rho[mode_name(m)] = cfg.energy.rho_wh_per_m[mode_index(m)];
  j["rho_wh_per_m"] = std::move(rho);
  json trans;
  for (Mode s : kAllModes)
    for (Mode sp : kAllModes) {
      if (s == sp) continue;
      double v = cfg.transitions.get(s, sp);
      if (v != 0.0)
        trans[std::string(mode_name(s)) + "->" + mode_name(sp)] = v;
    }
  j["transition_cost_s"] = std::move(trans);
  return j.dump(2) + "\n";
}

QueryConfig load_query_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return query_config_from_string(buf.str(), path);
}

void save_query_config(const QueryConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << query_config_to_string(cfg);
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace emob
