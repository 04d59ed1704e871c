#include "emob/reduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <tuple>

#include "emob/scenario.hpp"
#include "emob/shortest_path.hpp"

namespace emob {

namespace {

using json = nlohmann::ordered_json;

// Key order used in scenario files.
constexpr std::array<Mode, kNumModes> kFileModeOrder = {Mode::ECar, Mode::EBike,
                                                        Mode::EScooter, Mode::Walk};

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

Mode parse_mode(const json& j, const std::string& where) {
  std::string name = j.get<std::string>();
  auto mode = mode_from_name(name);
  if (!mode.has_value()) throw ParseError(where + ": unknown mode '" + name + "'");
  return *mode;
}

std::string edge_label(NodeId from, NodeId to, Mode mode) {
  return std::to_string(from) + " -> " + std::to_string(to) + " in " +
         mode_name(mode);
}

}  // namespace

std::vector<NodeId> ExpansionMap::node_sequence(NodeId from, NodeId to,
                                                Mode mode) const {
  auto it = legs.find({from, to, mode});
  if (it == legs.end())
    throw MissingExpansion("no recorded expansion for " + edge_label(from, to, mode));
  std::vector<NodeId> seq{it->second.front().from};
  for (const Leg& l : it->second) seq.push_back(l.to);
  return seq;
}

Reduction reduce(const MultiModalGraph& g, const HubRegistry& hubs, NodeId origin,
                 NodeId destination, const UserPreferences& prefs,
                 const EnergyParams& energy) {
  prefs.validate();
  energy.validate();
  if (!g.has_node(origin)) throw UnknownNodeError("origin node does not exist");
  if (!g.has_node(destination))
    throw UnknownNodeError("destination node does not exist");
  if (origin == destination)
    throw std::invalid_argument("origin equals destination");

  Reduction r;
  ReducedGraph& rg = r.graph;
  rg.original = {origin, destination};
  for (const EHub& h : hubs.hubs())
    if (h.node != origin && h.node != destination) rg.original.push_back(h.node);
  for (NodeId v : rg.original) {
    rg.xs.push_back(g.node_x(v));
    rg.ys.push_back(g.node_y(v));
  }

  std::map<NodeId, NodeId> reduced_id;
  for (std::size_t i = 0; i < rg.original.size(); ++i)
    reduced_id[rg.original[i]] = static_cast<NodeId>(i);
  std::vector<EHub> remapped;
  for (const EHub& h : hubs.hubs()) {
    EHub nh = h;
    nh.node = reduced_id.at(h.node);
    remapped.push_back(nh);
  }
  rg.hubs = HubRegistry(std::move(remapped));

  const int n = rg.num_nodes();
  for (NodeId i = 0; i < n; ++i) {
    bool src_hub = rg.hubs.is_hub(i);
    if (!src_hub && i != rg.origin) continue;  // a bare destination sources nothing
    for (Mode s : kAllModes) {
      if (!prefs.usable(s)) continue;
      if (is_vehicle(s) && !src_hub) continue;
      std::vector<NodeId> targets;
      for (NodeId j = 0; j < n; ++j) {
        if (j == i) continue;
        bool pair_ok = (src_hub && rg.hubs.is_hub(j)) ||
                       (s == Mode::Walk && (i == rg.origin || j == rg.destination));
        if (pair_ok) targets.push_back(j);
      }
      if (targets.empty()) continue;

      ShortestPathTree tree =
          mode_shortest_paths(g, rg.original[i], s, prefs.effective_alpha(s));
      for (NodeId j : targets) {
        NodeId tgt = rg.original[j];
        if (!std::isfinite(tree.time_s[tgt])) continue;
        rg.super_edges.push_back({i, j, s, tree.time_s[tgt], tree.dist_m[tgt]});
        std::vector<NodeId> path = extract_path(tree, rg.original[i], tgt);
        std::vector<Leg> legs;
        for (std::size_t a = 0; a + 1 < path.size(); ++a) {
          const Arc* arc = g.find_arc(path[a], path[a + 1]);
          double seconds = travel_cost(prefs, arc->distance_m, arc->speed(s), s);
          double wh = is_vehicle(s) ? energy.rho(s) * arc->distance_m : 0.0;
          legs.push_back(
              Leg::move(path[a], path[a + 1], s, arc->distance_m, seconds, wh));
        }
        r.expansion.legs.emplace(XKey{i, j, s}, std::move(legs));
      }
    }
  }
  std::sort(rg.super_edges.begin(), rg.super_edges.end(),
            [](const SuperEdge& a, const SuperEdge& b) {
              return std::tuple(a.from, a.to, mode_index(a.mode)) <
                     std::tuple(b.from, b.to, mode_index(b.mode));
            });

  bool origin_connected = false, dest_connected = false;
  for (const SuperEdge& e : rg.super_edges) {
    origin_connected |= e.from == rg.origin;
    dest_connected |= e.to == rg.destination;
  }
  if (!origin_connected)
    throw NoWalkPathToAnyHub("origin reaches neither a hub nor the destination on foot");
  if (!dest_connected)
    throw NoWalkPathToAnyHub("destination is walled off from every hub and the origin");

  r.expansion.original = rg.original;
  return r;
}

MilpModel build_reduced_model(const ReducedGraph& rg, const Query& q) {
  Query rq = q;
  rq.origin = rg.origin;
  rq.dest = rg.destination;
  std::vector<RideOption> rides;
  for (const SuperEdge& e : rg.super_edges) {
    if (!q.prefs.usable(e.mode)) continue;
    rides.push_back(
        {e.from, e.to, e.mode, e.cumulative_time_s, e.cumulative_distance_m});
  }
  return build_model_from_rides(rg.num_nodes(), rides, rg.hubs, rq);
}

Itinerary expand_itinerary(const Itinerary& reduced_itin, const ExpansionMap& map) {
  auto translate = [&](NodeId v) {
    if (v < 0 || static_cast<std::size_t>(v) >= map.original.size())
      throw MissingExpansion("leg references node " + std::to_string(v) +
                             " outside the reduction");
    return map.original[v];
  };
  std::vector<Leg> out;
  for (const Leg& l : reduced_itin.legs) {
    if (l.kind == Leg::Kind::Switch) {
      out.push_back(
          Leg::mode_switch(translate(l.from), l.mode, l.next_mode, l.seconds));
      continue;
    }
    translate(l.from);
    translate(l.to);
    auto it = map.legs.find({l.from, l.to, l.mode});
    if (it == map.legs.end())
      throw MissingExpansion("no recorded expansion for " +
                             edge_label(l.from, l.to, l.mode));
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return Itinerary::from_legs(std::move(out));
}

std::string reduced_to_string(const Reduction& r) {
  const ReducedGraph& rg = r.graph;
  json j;
  j["schema_version"] = 1;
  j["meta"] = {{"origin", rg.original[rg.origin]},
               {"destination", rg.original[rg.destination]}};
  json nodes = json::array();
  for (NodeId v = 0; v < rg.num_nodes(); ++v)
    nodes.push_back(json{{"id", v},
                         {"original", rg.original[v]},
                         {"x", rg.xs[v]},
                         {"y", rg.ys[v]}});
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const SuperEdge& e : rg.super_edges)
    edges.push_back(json{{"from", e.from},
                         {"to", e.to},
                         {"mode", mode_name(e.mode)},
                         {"time_s", e.cumulative_time_s},
                         {"distance_m", e.cumulative_distance_m}});
  j["super_edges"] = std::move(edges);
  json hubs = json::array();
  for (const EHub& h : rg.hubs.hubs()) {
    json modes = json::array();
    json soc;
    for (Mode m : kFileModeOrder) {
      if (!h.supports(m)) continue;
      modes.push_back(mode_name(m));
      soc[mode_name(m)] = h.best_soc(m);
    }
    hubs.push_back(json{{"node", h.node}, {"modes", std::move(modes)},
                        {"soc_wh", std::move(soc)}});
  }
  j["hubs"] = std::move(hubs);
  json expansion = json::array();
  for (const auto& [key, legs] : r.expansion.legs) {
    json path = json::array();
    json seconds = json::array(), dist = json::array(), wh = json::array();
    path.push_back(legs.front().from);
    for (const Leg& l : legs) {
      path.push_back(l.to);
      seconds.push_back(l.seconds);
      dist.push_back(l.distance_m);
      wh.push_back(l.wh_consumed);
    }
    expansion.push_back(json{{"from", std::get<0>(key)},
                             {"to", std::get<1>(key)},
                             {"mode", mode_name(std::get<2>(key))},
                             {"path", std::move(path)},
                             {"seconds", std::move(seconds)},
                             {"distance_m", std::move(dist)},
                             {"wh", std::move(wh)}});
  }
  j["expansion"] = std::move(expansion);
  return j.dump(2) + "\n";
}

Reduction reduced_from_string(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    const json& version = require(j, "schema_version", source);
    if (!version.is_number_integer() || version.get<int>() != 1)
      throw SchemaVersionMismatch(source + ": unsupported schema_version " +
                                  version.dump());
    Reduction r;
    ReducedGraph& rg = r.graph;
    for (const json& nd : require(j, "nodes", source)) {
      NodeId id = require(nd, "id", source + ".nodes").get<NodeId>();
      if (id != rg.num_nodes())
        throw ParseError(source + ".nodes: ids must be dense and ascending");
      rg.original.push_back(require(nd, "original", source + ".nodes").get<NodeId>());
      rg.xs.push_back(require(nd, "x", source + ".nodes").get<double>());
      rg.ys.push_back(require(nd, "y", source + ".nodes").get<double>());
    }
    if (rg.num_nodes() < 2)
      throw ParseError(source + ".nodes: need at least origin and destination");
    const json& meta = require(j, "meta", source);
    if (require(meta, "origin", source + ".meta").get<NodeId>() != rg.original[0] ||
        require(meta, "destination", source + ".meta").get<NodeId>() !=
            rg.original[1])
      throw ParseError(source + ".meta: origin/destination disagree with nodes");

    auto check_id = [&](NodeId v, const std::string& where) {
      if (v < 0 || v >= rg.num_nodes())
        throw ParseError(where + ": node " + std::to_string(v) + " out of range");
      return v;
    };
    for (const json& ed : require(j, "super_edges", source)) {
      const std::string where = source + ".super_edges";
      SuperEdge e;
      e.from = check_id(require(ed, "from", where).get<NodeId>(), where);
      e.to = check_id(require(ed, "to", where).get<NodeId>(), where);
      e.mode = parse_mode(require(ed, "mode", where), where);
      e.cumulative_time_s = require(ed, "time_s", where).get<double>();
      e.cumulative_distance_m = require(ed, "distance_m", where).get<double>();
      rg.super_edges.push_back(e);
    }
    std::vector<EHub> hubs;
    for (const json& hb : require(j, "hubs", source)) {
      const std::string where = source + ".hubs";
      EHub h;
      h.node = check_id(require(hb, "node", where).get<NodeId>(), where);
      const json& soc = require(hb, "soc_wh", where);
      for (const json& mode_entry : require(hb, "modes", where)) {
        Mode m = parse_mode(mode_entry, where);
        h.supported[mode_index(m)] = true;
        h.best_soc_wh[mode_index(m)] =
            require(soc, mode_name(m), where + ".soc_wh").get<double>();
      }
      hubs.push_back(h);
    }
    rg.hubs = HubRegistry(std::move(hubs));

    for (const json& ex : require(j, "expansion", source)) {
      const std::string where = source + ".expansion";
      NodeId from = check_id(require(ex, "from", where).get<NodeId>(), where);
      NodeId to = check_id(require(ex, "to", where).get<NodeId>(), where);
      Mode m = parse_mode(require(ex, "mode", where), where);
      std::vector<NodeId> path;
      for (const json& v : require(ex, "path", where)) path.push_back(v.get<NodeId>());
      const json& seconds = require(ex, "seconds", where);
      const json& dist = require(ex, "distance_m", where);
      const json& wh = require(ex, "wh", where);
      if (path.size() < 2 || seconds.size() + 1 != path.size() ||
          dist.size() != seconds.size() || wh.size() != seconds.size())
        throw ParseError(where + ": path and leg arrays disagree for " +
                         edge_label(from, to, m));
      std::vector<Leg> legs;
      for (std::size_t a = 0; a + 1 < path.size(); ++a)
        legs.push_back(Leg::move(path[a], path[a + 1], m, dist[a].get<double>(),
                                 seconds[a].get<double>(), wh[a].get<double>()));
      if (!r.expansion.legs.emplace(XKey{from, to, m}, std::move(legs)).second)
        throw ParseError(where + ": duplicate entry for " + edge_label(from, to, m));
    }
    r.expansion.original = rg.original;
    return r;
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Reduction load_reduced(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return reduced_from_string(buf.str(), path);
}

void save_reduced(const Reduction& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << reduced_to_string(r);
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace emob
