#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "emob/bench.hpp"
#include "emob/config.hpp"
#include "emob/dijkstra.hpp"
#include "emob/itinerary.hpp"
#include "emob/lp_format.hpp"
#include "emob/milp.hpp"
#include "emob/oracle.hpp"
#include "emob/reduction.hpp"
#include "emob/scenario.hpp"

namespace {

using namespace emob;

// Preference knobs shared by every query-shaped subcommand. Flags override
// whatever the query config file set.
struct PrefOpts {
  std::string config_file;
  std::vector<std::string> exclude;
  std::vector<std::string> alpha;
  bool soft = false;
  int t_max = -1;  // -1 keeps the config value
  double soc_mult = 1.0;
};

void add_pref_options(CLI::App* sub, PrefOpts& o) {
  sub->add_option("--query-config", o.config_file,
                  "query config json: alpha, excluded, t_max, rho, switch fees");
  sub->add_option("--exclude", o.exclude, "mode to exclude (repeatable)");
  sub->add_option("--alpha", o.alpha,
                  "preference factor as mode=value (repeatable)");
  sub->add_flag("--soft", o.soft, "excluded modes stay usable at a punitive factor");
  sub->add_option("--tmax", o.t_max, "transition budget");
  sub->add_option("--soc-mult", o.soc_mult, "scale every hub charge");
}

Mode parse_mode_arg(const std::string& name) {
  auto m = mode_from_name(name);
  if (!m.has_value()) throw CLI::ValidationError("unknown mode '" + name + "'");
  return *m;
}

Query make_query(const PrefOpts& o, NodeId origin, NodeId dest) {
  QueryConfig qc;
  if (!o.config_file.empty()) qc = load_query_config(o.config_file);
  for (const std::string& name : o.exclude)
    qc.prefs.excluded[mode_index(parse_mode_arg(name))] = true;
  for (const std::string& kv : o.alpha) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--alpha expects mode=value, got '" + kv + "'");
    Mode m = parse_mode_arg(kv.substr(0, eq));
    qc.prefs.alpha[mode_index(m)] = std::stod(kv.substr(eq + 1));
  }
  if (o.soft) qc.prefs.soft_exclusion = true;
  if (o.t_max >= 0) qc.prefs.t_max = o.t_max;
  Query q;
  q.origin = origin;
  q.dest = dest;
  q.prefs = qc.prefs;
  q.energy = qc.energy;
  q.transitions = qc.transitions;
  return q;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-modal shared e-mobility router"};
  app.require_subcommand(1);
  int rc = 0;

  // route
  auto* route = app.add_subcommand("route", "answer one origin/destination query");
  std::string route_graph, route_method = "milp";
  NodeId route_origin = 0, route_dest = 0;
  long route_bb_nodes = 1000000, route_time_ms = 0;
  double route_quantum = 0.1;
  bool route_explain = false;
  PrefOpts route_prefs;
  route->add_option("--graph", route_graph, "scenario json")->required();
  route->add_option("--origin", route_origin, "origin node id")->required();
  route->add_option("--dest", route_dest, "destination node id")->required();
  route->add_option("--method", route_method, "dijkstra | dijkstra-exact | milp | milp-reduced")
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kMethodNames),
                                                     std::end(kMethodNames))));
  route->add_option("--bb-nodes", route_bb_nodes, "branch and bound node budget");
  route->add_option("--time-ms", route_time_ms, "solve time budget, 0 = none");
  route->add_option("--quantum", route_quantum, "charge quantum for dijkstra-exact");
  route->add_flag("--explain", route_explain, "print the leg-by-leg journey");
  add_pref_options(route, route_prefs);
  route->callback([&]() {
    Scenario s = load_scenario(route_graph);
    HubRegistry hubs = route_prefs.soc_mult == 1.0
                           ? s.hubs
                           : scale_soc(s.hubs, route_prefs.soc_mult);
    Query q = make_query(route_prefs, route_origin, route_dest);
    MilpLimits limits;
    limits.max_bb_nodes = route_bb_nodes;
    limits.time_ms = route_time_ms;
    RouteOutcome oc = run_method(route_method, s.graph, hubs, q, limits, route_quantum);
    std::cout << "status: " << oc.status << "\n";
    if (oc.itinerary) {
      std::printf("objective_s: %.6f\ntransitions: %d\nsolve_ms: %.3f\nbuild_ms: %.3f\n",
                  oc.objective_s, oc.itinerary->transitions, oc.wall_ms, oc.build_ms);
      std::cout << "modes: " << mode_set_label(*oc.itinerary) << "\n";
      if (route_explain) std::cout << explain(*oc.itinerary);
      ResimulationReport rep = resimulate(s.graph, hubs, q, *oc.itinerary);
      if (!rep.ok) {
        std::cerr << "internal error: itinerary fails resimulation\n";
        for (const std::string& v : rep.violations) std::cerr << "  " << v << "\n";
        rc = 2;
      }
    }
  });

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic scenario");
  ScenarioSpec gen_spec;
  std::string gen_topology = "grid", gen_placement = "uniform-random", gen_out;
  gen->add_option("--name", gen_spec.name, "scenario name");
  gen->add_option("--nodes", gen_spec.n_nodes, "node count");
  gen->add_option("--topology", gen_topology, "grid | random-geometric")
      ->check(CLI::IsMember({"grid", "random-geometric"}));
  gen->add_option("--grid-cols", gen_spec.grid_cols, "grid columns, 0 = near-square");
  gen->add_option("--avg-degree", gen_spec.target_avg_degree,
                  "target degree (random-geometric)");
  gen->add_option("--hubs", gen_spec.k_hubs, "hub count");
  gen->add_option("--placement", gen_placement, "uniform-random | degree-weighted")
      ->check(CLI::IsMember({"uniform-random", "degree-weighted"}));
  gen->add_option("--seed", gen_spec.seed, "rng seed");
  gen->add_option("--out", gen_out, "output scenario json")->required();
  gen->callback([&]() {
    gen_spec.topology =
        gen_topology == "grid" ? Topology::Grid : Topology::RandomGeometric;
    gen_spec.hub_placement = gen_placement == "uniform-random"
                                 ? HubPlacement::UniformRandom
                                 : HubPlacement::DegreeWeighted;
    Scenario s = generate(gen_spec);
    save_scenario(s, gen_out);
    std::printf("wrote %s: %d nodes, %d arcs, %d hubs\n", gen_out.c_str(),
                s.graph.num_nodes(), s.graph.num_arcs(), s.hubs.k());
  });

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment grid");
  std::string bench_config, bench_out = ".";
  bench->add_option("--config", bench_config, "experiment config json")->required();
  bench->add_option("--out", bench_out, "output directory");
  bench->callback([&]() {
    ExperimentConfig cfg = load_config(bench_config);
    ExperimentResult res = run_experiment(cfg);
    std::filesystem::create_directories(bench_out);
    std::string csv_path = bench_out + "/metrics.csv";
    std::string summary_path = bench_out + "/summary.txt";
    write_file(csv_path, metrics_to_csv(res.rows));
    write_file(summary_path, res.summary);
    std::cout << res.summary;
    std::printf("wrote %s (%zu rows) and %s\n", csv_path.c_str(), res.rows.size(),
                summary_path.c_str());
  });

  // compare
  auto* compare = app.add_subcommand(
      "compare", "speedup report for milp vs milp-reduced from a metrics csv");
  std::string compare_metrics;
  compare->add_option("--metrics", compare_metrics, "metrics csv")->required();
  compare->callback([&]() {
    std::cout << compare_methods(load_metrics(compare_metrics)).text();
  });

  // soc-report
  auto* socrep = app.add_subcommand(
      "soc-report", "objective-vs-charge curves from a metrics csv");
  std::string socrep_metrics;
  socrep->add_option("--metrics", socrep_metrics, "metrics csv")->required();
  socrep->callback([&]() {
    std::cout << soc_sweep_report(load_metrics(socrep_metrics)).text();
  });

  // reduce
  auto* red = app.add_subcommand("reduce", "collapse a scenario onto its hubs");
  std::string red_graph, red_out;
  NodeId red_origin = 0, red_dest = 0;
  PrefOpts red_prefs;
  red->add_option("--graph", red_graph, "scenario json")->required();
  red->add_option("--origin", red_origin, "origin node id")->required();
  red->add_option("--dest", red_dest, "destination node id")->required();
  red->add_option("--out", red_out, "reduced graph json")->required();
  add_pref_options(red, red_prefs);
  red->callback([&]() {
    Scenario s = load_scenario(red_graph);
    HubRegistry hubs =
        red_prefs.soc_mult == 1.0 ? s.hubs : scale_soc(s.hubs, red_prefs.soc_mult);
    Query q = make_query(red_prefs, red_origin, red_dest);
    Reduction r = reduce(s.graph, hubs, q.origin, q.dest, q.prefs, q.energy);
    save_reduced(r, red_out);
    std::printf("wrote %s: %d nodes, %zu super-edges (from %d nodes, %d arcs)\n",
                red_out.c_str(), r.graph.num_nodes(), r.graph.super_edges.size(),
                s.graph.num_nodes(), s.graph.num_arcs());
  });

  // export-lp
  auto* exp = app.add_subcommand("export-lp", "write a query's model as LP text");
  std::string exp_graph, exp_out;
  NodeId exp_origin = 0, exp_dest = 0;
  bool exp_reduced = false;
  PrefOpts exp_prefs;
  exp->add_option("--graph", exp_graph, "scenario json")->required();
  exp->add_option("--origin", exp_origin, "origin node id")->required();
  exp->add_option("--dest", exp_dest, "destination node id")->required();
  exp->add_option("--out", exp_out, "output lp file")->required();
  exp->add_flag("--reduced", exp_reduced, "collapse onto hubs first");
  add_pref_options(exp, exp_prefs);
  exp->callback([&]() {
    Scenario s = load_scenario(exp_graph);
    HubRegistry hubs =
        exp_prefs.soc_mult == 1.0 ? s.hubs : scale_soc(s.hubs, exp_prefs.soc_mult);
    Query q = make_query(exp_prefs, exp_origin, exp_dest);
    MilpModel mm;
    if (exp_reduced) {
      Reduction r = reduce(s.graph, hubs, q.origin, q.dest, q.prefs, q.energy);
      mm = build_reduced_model(r.graph, q);
    } else {
      mm = build_model(s.graph, hubs, q);
    }
    export_lp(mm, exp_out);
    std::printf("wrote %s: %d columns, %d rows\n", exp_out.c_str(),
                mm.model.num_cols(), mm.model.num_rows());
  });

  // oracle: exhaustive reference, only sensible on tiny scenarios
  auto* oracle = app.add_subcommand("oracle", "exhaustive ground-truth search");
  oracle->group("");  // hidden from help
  std::string oracle_graph;
  NodeId oracle_origin = 0, oracle_dest = 0;
  PrefOpts oracle_prefs;
  oracle->add_option("--graph", oracle_graph, "scenario json")->required();
  oracle->add_option("--origin", oracle_origin, "origin node id")->required();
  oracle->add_option("--dest", oracle_dest, "destination node id")->required();
  add_pref_options(oracle, oracle_prefs);
  oracle->callback([&]() {
    Scenario s = load_scenario(oracle_graph);
    HubRegistry hubs = oracle_prefs.soc_mult == 1.0
                           ? s.hubs
                           : scale_soc(s.hubs, oracle_prefs.soc_mult);
    Query q = make_query(oracle_prefs, oracle_origin, oracle_dest);
    std::optional<Itinerary> best = enumerate_optimal(s.graph, hubs, q);
    if (!best) {
      std::cout << "status: infeasible\n";
      return;
    }
    std::printf("status: optimal\nobjective_s: %.6f\ntransitions: %d\n",
                best->total_seconds, best->transitions);
    std::cout << explain(*best);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
