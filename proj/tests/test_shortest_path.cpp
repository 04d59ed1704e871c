#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "emob/shortest_path.hpp"
#include "support/test_util.hpp"

using namespace emob;
using namespace emob::testutil;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// O(V^2) relaxation-based reference, no heap, no tie handling.
std::vector<double> naive_times(const MultiModalGraph& g, NodeId source, Mode mode,
                                double alpha) {
  std::vector<double> dist(g.num_nodes(), kInf);
  dist[source] = 0.0;
  for (int round = 0; round < g.num_nodes(); ++round) {
    bool changed = false;
    for (const Arc& a : g.all_arcs()) {
      if (!a.permits(mode) || dist[a.from] == kInf) continue;
      double nd = dist[a.from] + alpha * a.distance_m / a.speed(mode);
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

}  // namespace

TEST_CASE("line graph accumulates time and distance") {
  auto g = make_line_graph(4, 100.0, all_speeds(2.0));
  auto t = mode_shortest_paths(g, 0, Mode::Walk);
  CHECK(t.time_s == std::vector<double>{0.0, 50.0, 100.0, 150.0});
  CHECK(t.dist_m == std::vector<double>{0.0, 100.0, 200.0, 300.0});
  CHECK(extract_path(t, 0, 3) == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("unreachable nodes stay at infinity") {
  auto g = MultiModalGraph::build(make_nodes(3), {{0, 1, 10.0, all_speeds(1)},
                                                  {2, 1, 10.0, all_speeds(1)}});
  auto t = mode_shortest_paths(g, 0, Mode::Walk);
  CHECK(t.time_s[2] == kInf);
  CHECK(extract_path(t, 0, 2).empty());
}

TEST_CASE("arcs closed to the mode are skipped") {
  auto g = MultiModalGraph::build(
      make_nodes(3), {{0, 1, 10.0, walk_only_speed(1.0)},
                      {1, 2, 10.0, {kNoSpeed, 5.0, kNoSpeed, kNoSpeed}}});
  auto walk = mode_shortest_paths(g, 0, Mode::Walk);
  CHECK(walk.time_s[1] == 10.0);
  CHECK(walk.time_s[2] == kInf);
  auto scooter = mode_shortest_paths(g, 0, Mode::EScooter);
  CHECK(scooter.time_s[1] == kInf);
}

TEST_CASE("equal-cost paths resolve to the lexicographically smallest sequence") {
  // 0 -> {1, 2} -> 3 with identical costs both ways.
  auto g = MultiModalGraph::build(make_nodes(4), {{0, 1, 100.0, all_speeds(1)},
                                                  {0, 2, 100.0, all_speeds(1)},
                                                  {1, 3, 100.0, all_speeds(1)},
                                                  {2, 3, 100.0, all_speeds(1)}});
  auto t = mode_shortest_paths(g, 0, Mode::Walk);
  CHECK(extract_path(t, 0, 3) == std::vector<NodeId>{0, 1, 3});

  // A longer-but-equal-cost alternative through smaller ids wins: 0->1->2->3
  // (3 hops of 100) vs 0->4->3 (two hops of 150).
  auto g2 = MultiModalGraph::build(make_nodes(5), {{0, 1, 100.0, all_speeds(1)},
                                                   {1, 2, 100.0, all_speeds(1)},
                                                   {2, 3, 100.0, all_speeds(1)},
                                                   {0, 4, 150.0, all_speeds(1)},
                                                   {4, 3, 150.0, all_speeds(1)}});
  auto t2 = mode_shortest_paths(g2, 0, Mode::Walk);
  CHECK(t2.time_s[3] == 300.0);
  CHECK(extract_path(t2, 0, 3) == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("alpha scales the whole tree") {
  auto g = make_line_graph(3, 100.0, all_speeds(2.0));
  auto base = mode_shortest_paths(g, 0, Mode::ECar, 1.0);
  auto weighted = mode_shortest_paths(g, 0, Mode::ECar, 3.0);
  for (NodeId v = 0; v < 3; ++v)
    CHECK(weighted.time_s[v] == doctest::Approx(3.0 * base.time_s[v]));
}

TEST_CASE("matches a naive quadratic reference on random graphs") {
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    auto g = make_random_graph(seed, 14, 25);
    for (NodeId s = 0; s < g.num_nodes(); s += 3) {
      auto fast = mode_shortest_paths(g, s, Mode::EBike);
      auto slow = naive_times(g, s, Mode::EBike, 1.0);
      for (NodeId v = 0; v < g.num_nodes(); ++v)
        CHECK(fast.time_s[v] == doctest::Approx(slow[v]).epsilon(1e-12));
    }
  }
}

TEST_CASE("walking distances ignore vehicle-only shortcuts") {
  auto g = MultiModalGraph::build(
      make_nodes(3), {{0, 1, 100.0, all_speeds(1)},
                      {1, 2, 100.0, all_speeds(1)},
                      {0, 2, 50.0, {kNoSpeed, kNoSpeed, kNoSpeed, 10.0}}});
  auto dist = walk_distance_m(g, 0);
  CHECK(dist == std::vector<double>{0.0, 100.0, 200.0});
}
