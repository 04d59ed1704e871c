#include "emob/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <sstream>

#include "emob/rng.hpp"
#include "emob/shortest_path.hpp"

namespace emob {

namespace {

using json = nlohmann::ordered_json;

// Key order used in scenario files.
constexpr std::array<Mode, kNumModes> kFileModeOrder = {Mode::ECar, Mode::EBike,
                                                        Mode::EScooter, Mode::Walk};

struct UndirectedEdge {
  NodeId u, v;
  double distance_m;
};

void check_range(const char* what, Range r, bool positive) {
  if (!(r.lo <= r.hi) || (positive && !(r.lo > 0.0)) || !(r.lo >= 0.0))
    throw InfeasibleSpec(std::string(what) + " range [" + std::to_string(r.lo) + ", " +
                         std::to_string(r.hi) + "] is invalid");
}

std::vector<UndirectedEdge> grid_skeleton(const ScenarioSpec& spec, SplitMix64& rng,
                                          std::vector<NodeInput>& nodes) {
  const int n = spec.n_nodes;
  int cols = spec.grid_cols > 0
                 ? spec.grid_cols
                 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  nodes.clear();
  for (int id = 0; id < n; ++id)
    nodes.push_back({id, 100.0 * (id % cols), 100.0 * (id / cols)});
  std::vector<UndirectedEdge> edges;
  for (int id = 0; id < n; ++id) {
    bool row_end = (id % cols) == cols - 1;
    if (!row_end && id + 1 < n)
      edges.push_back({id, id + 1, static_cast<double>(rng.uniform_int(80, 140))});
    if (id + cols < n)
      edges.push_back({id, id + cols, static_cast<double>(rng.uniform_int(80, 140))});
  }
  return edges;
}

std::vector<UndirectedEdge> geometric_skeleton(const ScenarioSpec& spec,
                                               SplitMix64& rng,
                                               std::vector<NodeInput>& nodes) {
  const int n = spec.n_nodes;
  const double side = 100.0 * std::sqrt(static_cast<double>(n));
  nodes.clear();
  for (int id = 0; id < n; ++id) {
    double x = rng.uniform(0.0, side);
    double y = rng.uniform(0.0, side);
    nodes.push_back({id, x, y});
  }
  const double radius =
      side * std::sqrt(spec.target_avg_degree / (3.141592653589793 * n));

  auto euclid = [&](NodeId a, NodeId b) {
    double dx = nodes[a].x - nodes[b].x;
    double dy = nodes[a].y - nodes[b].y;
    return std::sqrt(dx * dx + dy * dy);
  };
  auto edge_len = [&](NodeId a, NodeId b) {
    return std::max(1.0, std::round(euclid(a, b)));
  };

  std::vector<UndirectedEdge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (euclid(u, v) <= radius) edges.push_back({u, v, edge_len(u, v)});

  // Deterministic connectivity repair: bridge the two closest nodes in
  // different components until one component remains.
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (comp[a] != a) a = comp[a] = comp[comp[a]];
    return a;
  };
  auto unite = [&](int a, int b) { comp[find(a)] = find(b); };
  for (const auto& e : edges) unite(e.u, e.v);
  while (true) {
    bool single = true;
    for (NodeId v = 1; v < n && single; ++v) single = find(v) == find(0);
    if (single) break;
    NodeId bu = -1, bv = -1;
    double best = std::numeric_limits<double>::infinity();
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v) {
        if (find(u) == find(v)) continue;
        double d = euclid(u, v);
        if (d < best) {
          best = d;
          bu = u;
          bv = v;
        }
      }
    edges.push_back({bu, bv, edge_len(bu, bv)});
    unite(bu, bv);
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return edges;
}

std::vector<NodeId> hub_order(const ScenarioSpec& spec, const std::vector<int>& degree,
                              std::uint64_t hub_seed) {
  const int n = spec.n_nodes;
  SplitMix64 rng(hub_seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (spec.hub_placement == HubPlacement::UniformRandom) {
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    return order;
  }
  // Degree-weighted order without replacement.
  std::vector<NodeId> pool = order;
  std::vector<NodeId> out;
  while (!pool.empty()) {
    long long total = 0;
    for (NodeId v : pool) total += degree[v];
    std::int64_t pick = rng.uniform_int(0, std::max(0LL, total - 1));
    std::size_t chosen = 0;
    long long acc = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += degree[pool[i]];
      if (pick < acc) {
        chosen = i;
        break;
      }
    }
    out.push_back(pool[chosen]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return out;
}

double soc_draw(std::uint64_t soc_salt, NodeId node, Mode mode, Range range) {
  SplitMix64 rng(soc_salt ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(node) +
                                                      1 + mode_index(mode))));
  return rng.uniform(range.lo, range.hi);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n_nodes < 2) throw InfeasibleSpec("scenario needs at least 2 nodes");
  if (k_hubs < 0 || k_hubs > n_nodes)
    throw InfeasibleSpec("k_hubs must lie in [0, n_nodes]");
  if (topology == Topology::RandomGeometric &&
      !(target_avg_degree > 0.0 && target_avg_degree < n_nodes))
    throw InfeasibleSpec("target_avg_degree must lie in (0, n_nodes)");
  if (grid_cols < 0) throw InfeasibleSpec("grid_cols must be >= 0");
  for (Mode m : kAllModes) check_range("speed", speed_ranges[mode_index(m)], true);
  for (Mode m : kVehicleModes) check_range("soc", soc_ranges[mode_index(m)], false);
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  SplitMix64 root(spec.seed);
  const std::uint64_t topo_seed = root.next();
  const std::uint64_t speed_seed = root.next();
  const std::uint64_t hub_seed = root.next();
  const std::uint64_t soc_salt = root.next();

  SplitMix64 topo_rng(topo_seed);
  std::vector<NodeInput> nodes;
  std::vector<UndirectedEdge> skeleton =
      spec.topology == Topology::Grid ? grid_skeleton(spec, topo_rng, nodes)
                                      : geometric_skeleton(spec, topo_rng, nodes);

  SplitMix64 speed_rng(speed_seed);
  std::vector<ArcInput> arcs;
  arcs.reserve(2 * skeleton.size());
  for (const UndirectedEdge& e : skeleton) {
    for (auto [from, to] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      ArcInput arc{from, to, e.distance_m, {}};
      for (Mode m : kAllModes) {
        Range r = spec.speed_ranges[mode_index(m)];
        arc.speed_mps[mode_index(m)] = speed_rng.uniform(r.lo, r.hi);
      }
      arcs.push_back(arc);
    }
  }

  Scenario s{MultiModalGraph::build(nodes, arcs), HubRegistry{}, spec.name, spec.seed};

  std::vector<int> degree(spec.n_nodes, 0);
  for (const Arc& a : s.graph.all_arcs()) ++degree[a.from];
  std::vector<NodeId> order = hub_order(spec, degree, hub_seed);
  std::vector<EHub> hubs;
  for (int i = 0; i < spec.k_hubs; ++i) {
    EHub h;
    h.node = order[i];
    for (Mode m : kVehicleModes) {
      h.supported[mode_index(m)] = true;
      h.best_soc_wh[mode_index(m)] =
          soc_draw(soc_salt, h.node, m, spec.soc_ranges[mode_index(m)]);
    }
    hubs.push_back(h);
  }
  s.hubs = HubRegistry(std::move(hubs));
  return s;
}

ODSet sample_od_pairs(const MultiModalGraph& g, int n, double min_walk_dist_m,
                      std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one pair");
  std::vector<std::pair<NodeId, NodeId>> valid;
  for (NodeId o = 0; o < g.num_nodes(); ++o) {
    std::vector<double> dist = walk_distance_m(g, o);
    for (NodeId d = 0; d < g.num_nodes(); ++d) {
      if (d == o) continue;
      if (dist[d] == std::numeric_limits<double>::infinity()) continue;
      if (dist[d] < min_walk_dist_m) continue;
      valid.push_back({o, d});
    }
  }
  if (valid.empty())
    throw NotEnoughReachablePairs("no origin/destination pair is walk-reachable at "
                                  "distance >= " +
                                  std::to_string(min_walk_dist_m));
  SplitMix64 rng(seed);
  for (std::size_t i = valid.size() - 1; i > 0; --i) {
    std::size_t j = rng.next_below(i + 1);
    std::swap(valid[i], valid[j]);
  }
  ODSet out;
  out.seed = seed;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    if (i < valid.size())
      out.pairs.push_back(valid[i]);
    else
      out.pairs.push_back(valid[rng.next_below(valid.size())]);
  }
  return out;
}

std::string scenario_to_string(const Scenario& s) {
  json j;
  j["schema_version"] = 1;
  j["meta"] = {{"name", s.name}, {"seed", s.seed}};
  json nodes = json::array();
  for (NodeId v = 0; v < s.graph.num_nodes(); ++v)
    nodes.push_back(json{{"id", v}, {"x", s.graph.node_x(v)}, {"y", s.graph.node_y(v)}});
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const Arc& a : s.graph.all_arcs()) {
    json speeds;
    for (Mode m : kFileModeOrder)
      if (a.permits(m)) speeds[mode_name(m)] = a.speed(m);
    edges.push_back(json{{"from", a.from},
                         {"to", a.to},
                         {"distance_m", a.distance_m},
                         {"speed_mps", std::move(speeds)}});
  }
  j["edges"] = std::move(edges);
  json hubs = json::array();
  for (const EHub& h : s.hubs.hubs()) {
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
  return j.dump(2) + "\n";
}

Scenario scenario_from_string(const std::string& text, const std::string& source) {
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
    const json& meta = require(j, "meta", source);
    Scenario s;
    s.name = require(meta, "name", source + ".meta").get<std::string>();
    s.seed = require(meta, "seed", source + ".meta").get<std::uint64_t>();

    std::vector<NodeInput> nodes;
    for (const json& nd : require(j, "nodes", source)) {
      nodes.push_back({require(nd, "id", source + ".nodes").get<NodeId>(),
                       require(nd, "x", source + ".nodes").get<double>(),
                       require(nd, "y", source + ".nodes").get<double>()});
    }
    std::vector<ArcInput> arcs;
    for (const json& ed : require(j, "edges", source)) {
      ArcInput a;
      a.from = require(ed, "from", source + ".edges").get<NodeId>();
      a.to = require(ed, "to", source + ".edges").get<NodeId>();
      a.distance_m = require(ed, "distance_m", source + ".edges").get<double>();
      const json& speeds = require(ed, "speed_mps", source + ".edges");
      for (Mode m : kAllModes) {
        auto it = speeds.find(mode_name(m));
        if (it != speeds.end()) a.speed_mps[mode_index(m)] = it->get<double>();
      }
      arcs.push_back(a);
    }
    std::vector<EHub> hubs;
    for (const json& hb : require(j, "hubs", source)) {
      EHub h;
      h.node = require(hb, "node", source + ".hubs").get<NodeId>();
      const json& soc = require(hb, "soc_wh", source + ".hubs");
      for (const json& mode_entry : require(hb, "modes", source + ".hubs")) {
        std::string name = mode_entry.get<std::string>();
        auto mode = mode_from_name(name);
        if (!mode.has_value())
          throw ParseError(source + ".hubs: unknown mode '" + name + "'");
        h.supported[mode_index(*mode)] = true;
        h.best_soc_wh[mode_index(*mode)] =
            require(soc, name.c_str(), source + ".hubs.soc_wh").get<double>();
      }
      hubs.push_back(h);
    }
    s.graph = MultiModalGraph::build(nodes, arcs);
    s.hubs = HubRegistry(std::move(hubs));
    return s;
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str(), path);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << scenario_to_string(s);
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace emob
