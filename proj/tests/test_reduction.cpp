#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "emob/milp.hpp"
#include "emob/oracle.hpp"
#include "emob/reduction.hpp"
#include "emob/scenario.hpp"

#include "support/instance_gen.hpp"

using namespace emob;
using emob::testutil::make_small_instance;

namespace {

Scenario corridor() {
  return load_scenario(std::string(TEST_DATA_DIR) + "/fig2.json");
}

const SuperEdge* find_edge(const ReducedGraph& rg, NodeId from, NodeId to, Mode m) {
  for (const SuperEdge& e : rg.super_edges)
    if (e.from == from && e.to == to && e.mode == m) return &e;
  return nullptr;
}

HubRegistry with_slack_charge(const HubRegistry& hubs) {
  std::vector<EHub> hs = hubs.hubs();
  for (EHub& h : hs)
    for (Mode m : kVehicleModes)
      if (h.supports(m)) h.best_soc_wh[mode_index(m)] = 1.0e6 + 0.0025;
  return HubRegistry(std::move(hs));
}

// Heap-free reference recomputation, deliberately written differently from
// the production search.
std::vector<double> naive_mode_times(const MultiModalGraph& g, NodeId source,
                                     Mode mode, double alpha) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> t(g.num_nodes(), inf);
  std::vector<char> done(g.num_nodes(), 0);
  t[source] = 0.0;
  for (int round = 0; round < g.num_nodes(); ++round) {
    int u = -1;
    double best = inf;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (!done[v] && t[v] < best) {
        best = t[v];
        u = v;
      }
    if (u < 0) break;
    done[u] = 1;
    for (const Arc& a : g.out_arcs(u))
      if (a.permits(mode))
        t[a.to] = std::min(t[a.to], t[u] + alpha * a.distance_m / a.speed(mode));
  }
  return t;
}

MultiModalGraph scooter_corridor(bool walkable_direct) {
  std::vector<NodeInput> nodes = {{0, 0, 0}, {1, 100, 0}, {2, 200, 0}};
  PerMode<double> scooter_only = {kNoSpeed, 4.0, kNoSpeed, kNoSpeed};
  std::vector<ArcInput> arcs = {{0, 1, 120.0, scooter_only},
                                {1, 2, 150.0, scooter_only}};
  if (walkable_direct) arcs.push_back({0, 2, 400.0, {1.0, kNoSpeed, kNoSpeed, kNoSpeed}});
  return MultiModalGraph::build(nodes, arcs);
}

}  // namespace

TEST_CASE("two-hub corridor collapses to four nodes with walk connectors") {
  Scenario s = corridor();
  Reduction r = reduce(s.graph, s.hubs, 0, 7, UserPreferences{});
  const ReducedGraph& rg = r.graph;

  REQUIRE(rg.num_nodes() == 4);
  CHECK(rg.original == std::vector<NodeId>{0, 7, 2, 5});
  CHECK(rg.origin == 0);
  CHECK(rg.destination == 1);
  CHECK(rg.xs[2] == 200.0);
  CHECK(rg.ys[3] == 0.0);
  CHECK_FALSE(rg.hubs.is_hub(0));
  CHECK_FALSE(rg.hubs.is_hub(1));
  REQUIRE(rg.hubs.is_hub(2));
  REQUIRE(rg.hubs.is_hub(3));
  CHECK(rg.hubs.find(2)->best_soc(Mode::EScooter) == 400.0);

  // 2 hub pairs x 4 modes, origin connectors to both hubs and the
  // destination, hub-to-destination connectors.
  CHECK(rg.super_edges.size() == 13);

  const SuperEdge* hub_to_hub = find_edge(rg, 2, 3, Mode::Walk);
  REQUIRE(hub_to_hub != nullptr);
  CHECK(hub_to_hub->cumulative_time_s == 450.0);
  CHECK(hub_to_hub->cumulative_distance_m == 450.0);
  for (Mode m : kVehicleModes) {
    const SuperEdge* e = find_edge(rg, 2, 3, m);
    REQUIRE(e != nullptr);
    CHECK(e->cumulative_time_s == 450.0);  // every speed in the fixture is 1
    const SuperEdge* back = find_edge(rg, 3, 2, m);
    REQUIRE(back != nullptr);
    CHECK(back->cumulative_distance_m == 450.0);
  }

  CHECK(find_edge(rg, 0, 2, Mode::Walk)->cumulative_time_s == 230.0);
  CHECK(find_edge(rg, 0, 3, Mode::Walk)->cumulative_time_s == 680.0);
  CHECK(find_edge(rg, 0, 1, Mode::Walk)->cumulative_time_s == 980.0);
  CHECK(find_edge(rg, 2, 1, Mode::Walk)->cumulative_time_s == 750.0);
  CHECK(find_edge(rg, 3, 1, Mode::Walk)->cumulative_time_s == 300.0);
  // Vehicles never leave the origin or enter the bare destination.
  CHECK(find_edge(rg, 0, 2, Mode::EScooter) == nullptr);
  CHECK(find_edge(rg, 3, 1, Mode::ECar) == nullptr);
  CHECK(find_edge(rg, 2, 0, Mode::Walk) == nullptr);

  CHECK(r.expansion.node_sequence(2, 3, Mode::Walk) ==
        std::vector<NodeId>{2, 3, 4, 5});
  CHECK(r.expansion.node_sequence(0, 1, Mode::Walk) ==
        std::vector<NodeId>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK_THROWS_AS(r.expansion.node_sequence(0, 2, Mode::ECar), MissingExpansion);
}

TEST_CASE("mode exclusions control which super-edges exist") {
  Scenario s = corridor();
  UserPreferences prefs;
  prefs.excluded[mode_index(Mode::ECar)] = true;

  SUBCASE("hard exclusion drops the mode") {
    Reduction r = reduce(s.graph, s.hubs, 0, 7, prefs);
    CHECK(r.graph.super_edges.size() == 11);
    CHECK(find_edge(r.graph, 2, 3, Mode::ECar) == nullptr);
    CHECK(find_edge(r.graph, 2, 3, Mode::EBike) != nullptr);
  }
  SUBCASE("soft exclusion keeps it at the punitive weight") {
    prefs.soft_exclusion = true;
    Reduction r = reduce(s.graph, s.hubs, 0, 7, prefs);
    const SuperEdge* e = find_edge(r.graph, 2, 3, Mode::ECar);
    REQUIRE(e != nullptr);
    CHECK(e->cumulative_time_s == 450.0 * UserPreferences::kExclusionAlpha);
    CHECK(e->cumulative_distance_m == 450.0);
  }
}

TEST_CASE("collapsing without hubs leaves the direct walk connector") {
  Scenario s = corridor();
  Reduction r = reduce(s.graph, HubRegistry{}, 0, 7, UserPreferences{});
  REQUIRE(r.graph.num_nodes() == 2);
  REQUIRE(r.graph.super_edges.size() == 1);
  CHECK(r.graph.super_edges[0].cumulative_time_s == 980.0);

  Query q;
  q.origin = 0;
  q.dest = 7;
  MilpResult full = solve(build_model(s.graph, HubRegistry{}, q));
  MilpResult red = solve(build_reduced_model(r.graph, q));
  REQUIRE(full.status == MilpStatus::Optimal);
  REQUIRE(red.status == MilpStatus::Optimal);
  CHECK(red.objective == doctest::Approx(full.objective).epsilon(1e-12));
  CHECK(red.objective == doctest::Approx(980.0).epsilon(1e-12));
}

TEST_CASE("an origin or destination cut off on foot is reported") {
  std::vector<EHub> hub1 = {EHub{1, {false, true, false, false}, {0, 500, 0, 0}}};

  SUBCASE("origin reaches nothing walkable") {
    MultiModalGraph g = scooter_corridor(false);
    CHECK_THROWS_AS(reduce(g, HubRegistry(hub1), 0, 2, UserPreferences{}),
                    NoWalkPathToAnyHub);
  }
  SUBCASE("a direct walk edge keeps the reduction alive") {
    MultiModalGraph g = scooter_corridor(true);
    Reduction r = reduce(g, HubRegistry(hub1), 0, 2, UserPreferences{});
    REQUIRE(r.graph.super_edges.size() == 1);
    CHECK(r.graph.super_edges[0].from == r.graph.origin);
    CHECK(r.graph.super_edges[0].to == r.graph.destination);
    CHECK(r.graph.super_edges[0].mode == Mode::Walk);
    CHECK(r.graph.super_edges[0].cumulative_distance_m == 400.0);
  }
  SUBCASE("destination walled off from hub and origin") {
    std::vector<NodeInput> nodes = {{0, 0, 0}, {1, 100, 0}, {2, 200, 0}};
    std::vector<ArcInput> arcs = {
        {0, 1, 120.0, {1.0, 4.0, kNoSpeed, kNoSpeed}},
        {1, 2, 150.0, {kNoSpeed, 4.0, kNoSpeed, kNoSpeed}}};
    MultiModalGraph g = MultiModalGraph::build(nodes, arcs);
    CHECK_THROWS_AS(reduce(g, HubRegistry(hub1), 0, 2, UserPreferences{}),
                    NoWalkPathToAnyHub);
  }
  SUBCASE("a dockable hub on the destination restores vehicle access") {
    std::vector<NodeInput> nodes = {{0, 0, 0}, {1, 100, 0}, {2, 200, 0}};
    std::vector<ArcInput> arcs = {
        {0, 1, 120.0, {1.0, 4.0, kNoSpeed, kNoSpeed}},
        {1, 2, 150.0, {kNoSpeed, 4.0, kNoSpeed, kNoSpeed}}};
    MultiModalGraph g = MultiModalGraph::build(nodes, arcs);
    std::vector<EHub> two = {EHub{1, {false, true, false, false}, {0, 500, 0, 0}},
                             EHub{2, {false, true, false, false}, {0, 500, 0, 0}}};
    Reduction r = reduce(g, HubRegistry(two), 0, 2, UserPreferences{});
    REQUIRE(r.graph.num_nodes() == 3);  // destination folds into its hub
    const SuperEdge* e = find_edge(r.graph, 2, 1, Mode::EScooter);
    REQUIRE(e != nullptr);
    CHECK(e->cumulative_distance_m == 150.0);

    Query q;
    q.origin = 0;
    q.dest = 2;
    MilpResult red = solve(build_reduced_model(r.graph, q));
    REQUIRE(red.status == MilpStatus::Optimal);
    // Walk 120 m at 1 m/s, then scooter 150 m at 4 m/s, docked on arrival.
    CHECK(red.objective == doctest::Approx(120.0 + 150.0 / 4.0).epsilon(1e-12));
    Query rq = q;
    rq.origin = r.graph.origin;
    rq.dest = r.graph.destination;
    MilpModel mm = build_reduced_model(r.graph, q);
    Itinerary full = expand_itinerary(extract_itinerary(solve(mm), mm, rq),
                                      r.expansion);
    CHECK(resimulate(g, HubRegistry(two), q, full).ok);
  }
}

TEST_CASE("hubs on the endpoints fold into origin and destination") {
  Scenario s = corridor();

  SUBCASE("origin on a hub") {
    Reduction r = reduce(s.graph, s.hubs, 2, 7, UserPreferences{});
    REQUIRE(r.graph.num_nodes() == 3);
    CHECK(r.graph.original == std::vector<NodeId>{2, 7, 5});
    CHECK(r.graph.hubs.is_hub(0));
    CHECK_FALSE(r.graph.hubs.is_hub(1));
    CHECK(r.graph.hubs.is_hub(2));
    // Hub pairs 0<->2 in all four modes plus walk connectors to the bare
    // destination from both of them.
    CHECK(r.graph.super_edges.size() == 10);
    CHECK(find_edge(r.graph, 0, 2, Mode::ECar) != nullptr);
    CHECK(find_edge(r.graph, 0, 1, Mode::Walk)->cumulative_time_s == 750.0);
  }
  SUBCASE("both endpoints on hubs allows docking at the destination") {
    Query q;
    q.origin = 2;
    q.dest = 5;
    q.prefs.alpha[mode_index(Mode::Walk)] = 3.0;
    Reduction r = reduce(s.graph, s.hubs, 2, 5, q.prefs);
    REQUIRE(r.graph.num_nodes() == 2);
    CHECK(r.graph.super_edges.size() == 8);
    MilpModel mm = build_reduced_model(r.graph, q);
    MilpResult res = solve(mm);
    REQUIRE(res.status == MilpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(450.0).epsilon(1e-12));

    Query rq = q;
    rq.origin = r.graph.origin;
    rq.dest = r.graph.destination;
    Itinerary reduced_it = extract_itinerary(res, mm, rq);
    Itinerary full = expand_itinerary(reduced_it, r.expansion);
    CHECK(full.transitions == 1);
    CHECK(full.legs.back().to == 5);
    CHECK(resimulate(s.graph, s.hubs, q, full).ok);
  }
}

TEST_CASE("every super-edge survives an independent recomputation") {
  ScenarioSpec spec;
  spec.name = "reduction-xcheck";
  spec.n_nodes = 100;
  spec.topology = Topology::RandomGeometric;
  spec.k_hubs = 5;
  spec.seed = 414243;
  Scenario s = generate(spec);
  ODSet od = sample_od_pairs(s.graph, 1, 400.0, 7);
  NodeId origin = od.pairs[0].first, dest = od.pairs[0].second;

  UserPreferences prefs;
  Reduction r = reduce(s.graph, s.hubs, origin, dest, prefs);
  const ReducedGraph& rg = r.graph;
  REQUIRE(rg.num_nodes() >= 5);

  for (const SuperEdge& e : rg.super_edges) {
    CAPTURE(e.from);
    CAPTURE(e.to);
    std::vector<double> ref = naive_mode_times(s.graph, rg.original[e.from], e.mode,
                                               prefs.effective_alpha(e.mode));
    CHECK(e.cumulative_time_s ==
          doctest::Approx(ref[rg.original[e.to]]).epsilon(1e-12));

    std::vector<NodeId> seq = r.expansion.node_sequence(e.from, e.to, e.mode);
    REQUIRE(seq.size() >= 2);
    CHECK(seq.front() == rg.original[e.from]);
    CHECK(seq.back() == rg.original[e.to]);
    double dist = 0.0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const Arc* a = s.graph.find_arc(seq[i], seq[i + 1]);
      REQUIRE(a != nullptr);
      CHECK(a->permits(e.mode));
      dist += a->distance_m;
    }
    CHECK(dist == e.cumulative_distance_m);
  }

  // Completeness: every connected ordered hub pair appears in every mode.
  for (NodeId i = 2; i < rg.num_nodes(); ++i)
    for (Mode m : kAllModes) {
      std::vector<double> ref =
          naive_mode_times(s.graph, rg.original[i], m, prefs.effective_alpha(m));
      for (NodeId j = 2; j < rg.num_nodes(); ++j) {
        if (i == j) continue;
        bool reachable = std::isfinite(ref[rg.original[j]]);
        CHECK((find_edge(rg, i, j, m) != nullptr) == reachable);
      }
    }
}

TEST_CASE("the collapsed model never beats the full one and matches it with slack charge") {
  int compared = 0, used_vehicles = 0;
  for (std::uint64_t seed = 1; seed <= 240; ++seed) {
    auto inst = make_small_instance(seed);
    CAPTURE(seed);

    MilpResult full = solve(build_model(inst.g, inst.hubs, inst.q));
    Reduction r =
        reduce(inst.g, inst.hubs, inst.q.origin, inst.q.dest, inst.q.prefs,
               inst.q.energy);
    MilpModel red_model = build_reduced_model(r.graph, inst.q);
    MilpResult red = solve(red_model);
    REQUIRE(full.status == MilpStatus::Optimal);
    REQUIRE(red.status == MilpStatus::Optimal);
    double tol = 1e-9 * std::max(1.0, std::abs(full.objective));
    CHECK(red.objective >= full.objective - tol);

    // Collapsing is exact once no battery constraint can bind.
    HubRegistry slack_hubs = with_slack_charge(inst.hubs);
    MilpResult full_slack = solve(build_model(inst.g, slack_hubs, inst.q));
    Reduction rs = reduce(inst.g, slack_hubs, inst.q.origin, inst.q.dest,
                          inst.q.prefs, inst.q.energy);
    MilpModel red_slack_model = build_reduced_model(rs.graph, inst.q);
    MilpResult red_slack = solve(red_slack_model);
    REQUIRE(full_slack.status == MilpStatus::Optimal);
    REQUIRE(red_slack.status == MilpStatus::Optimal);
    double stol = 1e-9 * std::max(1.0, std::abs(full_slack.objective));
    CHECK(std::abs(red_slack.objective - full_slack.objective) <= stol);

    auto truth = enumerate_optimal(inst.g, slack_hubs, inst.q);
    REQUIRE(truth.has_value());
    CHECK(std::abs(red_slack.objective - truth->total_seconds) <= stol);
    ++compared;

    // The expanded solution must hold up on the original network.
    Query rq = inst.q;
    rq.origin = rs.graph.origin;
    rq.dest = rs.graph.destination;
    Itinerary reduced_it = extract_itinerary(red_slack, red_slack_model, rq);
    Itinerary expanded = expand_itinerary(reduced_it, rs.expansion);
    CHECK(expanded.total_seconds ==
          doctest::Approx(reduced_it.total_seconds).epsilon(1e-12));
    CHECK(expanded.transitions == reduced_it.transitions);
    CHECK(resimulate(inst.g, slack_hubs, inst.q, expanded).ok);
    if (expanded.modes_used().size() > 1) ++used_vehicles;

    Query bq = inst.q;
    bq.origin = r.graph.origin;
    bq.dest = r.graph.destination;
    Itinerary binding_it =
        expand_itinerary(extract_itinerary(red, red_model, bq), r.expansion);
    CHECK(resimulate(inst.g, inst.hubs, inst.q, binding_it).ok);
  }
  CHECK(compared >= 200);
  CHECK(used_vehicles > 20);  // the family must exercise actual mode changes
}

TEST_CASE("expansion restores full resolution") {
  Scenario s = corridor();
  Reduction r = reduce(s.graph, s.hubs, 0, 7, UserPreferences{});

  SUBCASE("a single super-edge becomes its recorded path") {
    Itinerary one = Itinerary::from_legs({Leg::move(2, 3, Mode::Walk, 450, 450, 0)});
    Itinerary full = expand_itinerary(one, r.expansion);
    REQUIRE(full.legs.size() == 3);
    CHECK(full.legs[0].from == 2);
    CHECK(full.legs[1].from == 3);
    CHECK(full.legs[2].to == 5);
    CHECK(full.total_seconds == 450.0);
  }
  SUBCASE("legs splice with shared junctions and exact totals") {
    std::vector<Leg> legs = {
        Leg::move(0, 2, Mode::Walk, 230, 230, 0),
        Leg::mode_switch(2, Mode::Walk, Mode::EScooter, 0.0),
        Leg::move(2, 3, Mode::EScooter, 450, 450, 0.015 * 450),
        Leg::mode_switch(3, Mode::EScooter, Mode::Walk, 0.0),
        Leg::move(3, 1, Mode::Walk, 300, 300, 0),
    };
    Itinerary reduced_it = Itinerary::from_legs(std::move(legs));
    Itinerary full = expand_itinerary(reduced_it, r.expansion);
    REQUIRE(full.legs.size() == 9);  // 7 moves, 2 switches
    CHECK(full.total_seconds == reduced_it.total_seconds);
    CHECK(full.total_seconds == 980.0);
    CHECK(full.transitions == 2);
    for (std::size_t i = 0; i + 1 < full.legs.size(); ++i)
      CHECK(full.legs[i].to == full.legs[i + 1].from);

    Query q;
    q.origin = 0;
    q.dest = 7;
    CHECK(resimulate(s.graph, s.hubs, q, full).ok);
  }
  SUBCASE("rides outside the map are refused") {
    Itinerary bad = Itinerary::from_legs({Leg::move(3, 2, Mode::ECar, 1, 1, 1)});
    Itinerary absent = Itinerary::from_legs({Leg::move(0, 2, Mode::ECar, 1, 1, 1)});
    Itinerary oob = Itinerary::from_legs({Leg::move(0, 9, Mode::Walk, 1, 1, 0)});
    CHECK_NOTHROW(expand_itinerary(bad, r.expansion));
    CHECK_THROWS_AS(expand_itinerary(absent, r.expansion), MissingExpansion);
    CHECK_THROWS_AS(expand_itinerary(oob, r.expansion), MissingExpansion);
    CHECK_THROWS_WITH(expand_itinerary(absent, r.expansion),
                      doctest::Contains("no recorded expansion"));
  }
}

TEST_CASE("a dumped reduction reloads unchanged") {
  Scenario s = corridor();
  Reduction r = reduce(s.graph, s.hubs, 0, 7, UserPreferences{});
  std::string text = reduced_to_string(r);
  Reduction back = reduced_from_string(text, "mem");

  CHECK(back.graph.original == r.graph.original);
  CHECK(back.graph.xs == r.graph.xs);
  CHECK(back.graph.ys == r.graph.ys);
  REQUIRE(back.graph.super_edges.size() == r.graph.super_edges.size());
  for (std::size_t i = 0; i < r.graph.super_edges.size(); ++i) {
    const SuperEdge& a = r.graph.super_edges[i];
    const SuperEdge& b = back.graph.super_edges[i];
    CHECK(a.from == b.from);
    CHECK(a.to == b.to);
    CHECK(a.mode == b.mode);
    CHECK(a.cumulative_time_s == b.cumulative_time_s);
    CHECK(a.cumulative_distance_m == b.cumulative_distance_m);
  }
  REQUIRE(back.graph.hubs.k() == 2);
  CHECK(back.graph.hubs.find(2)->best_soc(Mode::ECar) == 50000.0);
  REQUIRE(back.expansion.legs.size() == r.expansion.legs.size());
  for (const auto& [key, legs] : r.expansion.legs) {
    auto it = back.expansion.legs.find(key);
    REQUIRE(it != back.expansion.legs.end());
    REQUIRE(it->second.size() == legs.size());
    for (std::size_t i = 0; i < legs.size(); ++i) {
      CHECK(it->second[i].from == legs[i].from);
      CHECK(it->second[i].to == legs[i].to);
      CHECK(it->second[i].seconds == legs[i].seconds);
      CHECK(it->second[i].distance_m == legs[i].distance_m);
      CHECK(it->second[i].wh_consumed == legs[i].wh_consumed);
    }
  }

  SUBCASE("file round trip") {
    std::string path = "reduction_roundtrip.json";
    save_reduced(r, path);
    Reduction loaded = load_reduced(path);
    CHECK(reduced_to_string(loaded) == text);
    std::remove(path.c_str());
  }
  SUBCASE("rejects foreign or damaged input") {
    CHECK_THROWS_AS(reduced_from_string("{", "bad"), ParseError);
    CHECK_THROWS_AS(reduced_from_string("{\"schema_version\": 2}", "bad"),
                    SchemaVersionMismatch);
    CHECK_THROWS_AS(reduced_from_string("{\"schema_version\": 1, \"nodes\": []}",
                                        "bad"),
                    ParseError);
    CHECK_THROWS_AS(load_reduced("does_not_exist.json"), ParseError);
    std::string broken = text;
    auto pos = broken.find("\"path\"");
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, 6, "\"gap\"");
    CHECK_THROWS_AS(reduced_from_string(broken, "bad"), ParseError);
  }
}
