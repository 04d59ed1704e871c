#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "emob/dijkstra.hpp"
#include "emob/oracle.hpp"
#include "emob/shortest_path.hpp"
#include "support/instance_gen.hpp"
#include "support/test_util.hpp"

using namespace emob;
using namespace emob::testutil;

namespace {

EHub hub_at(NodeId v, std::initializer_list<std::pair<Mode, double>> socs) {
  EHub h;
  h.node = v;
  for (auto [m, soc] : socs) {
    h.supported[mode_index(m)] = true;
    h.best_soc_wh[mode_index(m)] = soc;
  }
  return h;
}

Query query(NodeId o, NodeId d, int t_max = 2) {
  Query q;
  q.origin = o;
  q.dest = d;
  q.prefs.t_max = t_max;
  return q;
}

}  // namespace

TEST_CASE("two nodes, one arc") {
  auto g = make_line_graph(2, 100.0, walk_only_speed(2.0));
  auto best = enumerate_optimal(g, HubRegistry{}, query(0, 1));
  REQUIRE(best.has_value());
  CHECK(best->total_seconds == 50.0);
  CHECK(best->transitions == 0);
  CHECK(best->legs.size() == 1);
}

TEST_CASE("without hubs enumeration matches walking shortest paths") {
  for (std::uint64_t seed : {2u, 5u, 9u, 13u, 27u}) {
    CAPTURE(seed);
    auto g = make_random_graph(seed, 8, 8);
    auto tree = mode_shortest_paths(g, 0, Mode::Walk);
    auto best = enumerate_optimal(g, HubRegistry{}, query(0, 7));
    REQUIRE(best.has_value());
    CHECK(best->total_seconds == doctest::Approx(tree.time_s[7]).epsilon(1e-13));
  }
}

TEST_CASE("equal-cost itineraries resolve to the fewest switches") {
  PerMode<double> walk_scooter = {1.0, 1.0, kNoSpeed, kNoSpeed};
  std::vector<ArcInput> arcs = {{0, 1, 100.0, walk_scooter},
                                {1, 0, 100.0, walk_scooter}};
  auto g = MultiModalGraph::build(make_nodes(2), arcs);
  HubRegistry hubs({hub_at(0, {{Mode::EScooter, 1000.5}}),
                    hub_at(1, {{Mode::EScooter, 1000.5}})});
  auto best = enumerate_optimal(g, hubs, query(0, 1));
  REQUIRE(best.has_value());
  CHECK(best->total_seconds == 100.0);
  CHECK(best->transitions == 0);
  CHECK(best->modes_used() == std::vector<Mode>{Mode::Walk});
}

TEST_CASE("rides may pass through the destination before docking back") {
  PerMode<double> wc = {1.0, kNoSpeed, kNoSpeed, 10.0};
  std::vector<ArcInput> arcs = {{0, 1, 1000.0, wc},
                                {1, 0, 1000.0, wc},
                                {1, 2, 100.0, wc},
                                {2, 1, 100.0, wc}};
  auto g = MultiModalGraph::build(make_nodes(3), arcs);
  HubRegistry hubs({hub_at(0, {{Mode::ECar, 1000.5}}),
                    hub_at(2, {{Mode::ECar, 1000.5}})});
  auto best = enumerate_optimal(g, hubs, query(0, 1));
  REQUIRE(best.has_value());
  CHECK(best->total_seconds == 210.0);
  CHECK(best->transitions == 2);
}

TEST_CASE("enumeration agrees with the exact label search") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    auto inst = make_small_instance(seed);
    auto truth = enumerate_optimal(inst.g, inst.hubs, inst.q);
    auto labeled = route_exact(inst.g, inst.hubs, inst.q, kTestEnergyQuantum);
    REQUIRE(truth.has_value() == labeled.has_value());
    if (!truth.has_value()) continue;
    CHECK(labeled->total_seconds ==
          doctest::Approx(truth->total_seconds).epsilon(1e-12));
    CHECK(labeled->transitions == truth->transitions);
    CHECK(resimulate(inst.g, inst.hubs, inst.q, *truth).ok);
  }
}

TEST_CASE("relabeling nodes never changes the optimum") {
  auto base = make_small_instance(17);
  auto truth = enumerate_optimal(base.g, base.hubs, base.q);
  REQUIRE(truth.has_value());

  const int n = base.g.num_nodes();
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    CAPTURE(seed);
    SplitMix64 rng(seed);
    std::vector<NodeId> relabel(n);
    for (int i = 0; i < n; ++i) relabel[i] = i;
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(relabel[i], relabel[j]);
    }

    std::vector<NodeInput> nodes = make_nodes(n);
    std::vector<ArcInput> arcs;
    for (const Arc& a : base.g.all_arcs()) {
      ArcInput in;
      in.from = relabel[a.from];
      in.to = relabel[a.to];
      in.distance_m = a.distance_m;
      in.speed_mps = a.speed_mps;
      arcs.push_back(in);
    }
    std::vector<EHub> hubs;
    for (EHub h : base.hubs.hubs()) {
      h.node = relabel[h.node];
      hubs.push_back(h);
    }
    Query q = base.q;
    q.origin = relabel[base.q.origin];
    q.dest = relabel[base.q.dest];

    auto mapped = enumerate_optimal(MultiModalGraph::build(nodes, arcs),
                                    HubRegistry(std::move(hubs)), q);
    REQUIRE(mapped.has_value());
    CHECK(mapped->total_seconds ==
          doctest::Approx(truth->total_seconds).epsilon(1e-12));
  }
}

TEST_CASE("oversized instances are refused, not truncated") {
  auto g = make_line_graph(13, 100.0, all_speeds(1.0));
  CHECK_THROWS_AS(enumerate_optimal(g, HubRegistry{}, query(0, 12)), TooLargeError);

  OracleLimits wide;
  wide.max_nodes = 20;
  wide.max_path_len = 64;
  auto g17 = make_line_graph(17, 100.0, all_speeds(1.0));
  CHECK_THROWS_AS(enumerate_optimal(g17, HubRegistry{}, query(0, 16), wide),
                  TooLargeError);

  OracleLimits tiny;
  tiny.max_states = 3;
  auto g8 = make_random_graph(4, 8, 8);
  CHECK_THROWS_AS(enumerate_optimal(g8, HubRegistry{}, query(0, 7), tiny),
                  TooLargeError);
}
