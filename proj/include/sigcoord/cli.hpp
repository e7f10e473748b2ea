#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigcoord/harness.hpp"

namespace sigcoord {

namespace cli_detail {

struct GridSize {
  std::size_t rows = 0, cols = 0;
};

inline GridSize parse_grid(const std::string& s) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw CLI::ValidationError("--grid", "expected RxC, got '" + s + "'");
  GridSize g{std::stoul(m[1]), std::stoul(m[2])};
  if (g.rows == 0 || g.cols == 0) throw CLI::ValidationError("--grid", "rows and cols must be >= 1");
  return g;
}

struct NetworkArgs {
  std::string roadnet;
  std::string grid;
  double h_len = 300.0, v_len = 300.0, sat_flow = kDefaultPhasedFlow;

  void add(CLI::App& app) {
    auto* r = app.add_option("--roadnet", roadnet, "roadnet JSON file");
    auto* g = app.add_option("--grid", grid, "synthetic grid RxC");
    r->excludes(g);
    g->excludes(r);
    app.add_option("--h-len", h_len, "horizontal link length (m)");
    app.add_option("--v-len", v_len, "vertical link length (m)");
    app.add_option("--sat-flow", sat_flow, "saturation flow of phased movements (veh/period)");
  }

  RoadNetwork load() const {
    if (!roadnet.empty()) return load_network(roadnet);
    if (grid.empty()) throw CLI::RequiredError("--roadnet or --grid");
    const auto g = parse_grid(grid);
    return build_grid(g.rows, g.cols, h_len, v_len, sat_flow);
  }
};

struct ScenarioArgs {
  NetworkArgs network;
  std::string flow;
  std::optional<double> rate, duration;
  std::string controller = "emc";
  double budget_ms = 3000.0;
  double epsilon = 0.8;
  std::size_t max_sweeps = 4;
  double tau = 10.0;
  std::optional<double> horizon_s;
  std::uint64_t seed = 0;
  std::optional<double> mu_ms;
  std::size_t nodes = 0;
  bool macro = false;

  void add(CLI::App& app, bool with_controller) {
    network.add(app);
    auto* f = app.add_option("--flow", flow, "flow JSON file");
    auto* r = app.add_option("--rate", rate, "uniform arrival rate (veh/s)");
    app.add_option("--duration", duration, "flow duration (s)");
    f->excludes(r);
    r->excludes(f);
    if (with_controller)
      app.add_option("--controller", controller, "fixedtime | maxpressure | nlcoor | emc")
          ->check(CLI::IsMember({"fixedtime", "maxpressure", "nlcoor", "emc"}));
    app.add_option("--budget-ms", budget_ms, "decision budget per period (ms)")->check(CLI::PositiveNumber);
    app.add_option("--epsilon", epsilon, "share of the budget for network-level coordination")->check(CLI::Range(0.0, 1.0));
    app.add_option("--max-sweeps", max_sweeps, "local improvement sweeps per period");
    app.add_option("--tau", tau, "period length (s)")->check(CLI::PositiveNumber);
    app.add_option("--horizon-s", horizon_s, "simulated time (s); defaults to the flow duration");
    app.add_option("--seed", seed, "scenario seed");
    app.add_option("--mu-ms", mu_ms, "mean per-message communication delay (ms)");
    app.add_option("--nodes", nodes, "hosts for delay accounting (0 charges every message)");
    app.add_flag("--macro", macro, "expected-value queue dynamics instead of vehicles");
  }

  Scenario build() const {
    Scenario s;
    s.network = network.load();
    double span = 3600.0;
    if (!flow.empty()) {
      s.flow = load_flow(s.network, flow, seed);
      for (const auto& v : s.flow) span = std::max(span, v.depart_s);
    } else {
      if (!rate || !duration) throw CLI::RequiredError("--flow or both --rate and --duration");
      s.flow = generate_uniform_flow(s.network, *rate, *duration, seed);
      span = *duration;
    }
    s.sim.tau_s = tau;
    s.sim.horizon = static_cast<std::size_t>(std::ceil(horizon_s.value_or(span) / tau - 1e-9));
    if (s.sim.horizon == 0) throw CLI::ValidationError("--horizon-s", "horizon must cover at least one period");
    s.sim.seed = seed;
    s.sim.mode = macro ? SimMode::Macro : SimMode::Micro;
    s.controller = *parse_controller(controller);
    s.emc.budget = CoorBudget::WallClock(budget_ms);
    s.emc.epsilon = epsilon;
    s.emc.loc_iai_max_sweeps = max_sweeps;
    if (mu_ms) s.delay = DelayModel{*mu_ms, 3.0, seed, nodes};
    return s;
  }
};

inline std::ostream& open_or(std::ofstream& file, const std::string& path, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

}  // namespace cli_detail

// Entry point of the command-line tool. Returns 0 on success, 2 on a usage
// error and 1 on any other failure.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Decentralized traffic-signal coordination and evaluation"};
  app.require_subcommand(1);

  ScenarioArgs run_args;
  std::string run_out;
  auto* run = app.add_subcommand("run", "simulate one controller and write the per-period metrics CSV");
  run_args.add(*run, true);
  run->add_option("--out", run_out, "metrics CSV (default stdout)");

  NetworkArgs grid_args;
  std::string grid_out;
  auto* gen_grid = app.add_subcommand("gen-grid", "write a synthetic grid roadnet JSON");
  grid_args.add(*gen_grid);
  gen_grid->add_option("--out", grid_out, "roadnet JSON (default stdout)");

  NetworkArgs flow_net;
  double flow_rate = 0.0, flow_duration = 3600.0;
  std::uint64_t flow_seed = 0;
  std::string flow_out;
  auto* gen_flow = app.add_subcommand("gen-flow", "write a uniform-rate flow JSON");
  flow_net.add(*gen_flow);
  gen_flow->add_option("--rate", flow_rate, "arrival rate (veh/s)")->required()->check(CLI::PositiveNumber);
  gen_flow->add_option("--duration", flow_duration, "duration (s)")->check(CLI::PositiveNumber);
  gen_flow->add_option("--seed", flow_seed, "seed");
  gen_flow->add_option("--out", flow_out, "flow JSON (default stdout)");

  NetworkArgs delay_net;
  double delay_mu = 20.0;
  std::size_t delay_passes = 2, delay_nodes = 10;
  std::uint64_t delay_seed = 0;
  auto* comm = app.add_subcommand("comm-delay", "modelled communication delay of message passing");
  delay_net.add(*comm);
  comm->add_option("--mu-ms", delay_mu, "mean per-message delay (ms)");
  comm->add_option("--passes", delay_passes, "message-passing passes");
  comm->add_option("--nodes", delay_nodes, "hosts (0 charges every message)");
  comm->add_option("--seed", delay_seed, "seed");

  ScenarioArgs cmp_args;
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "run every controller on one scenario and tabulate");
  cmp_args.add(*cmp, false);
  cmp->add_option("--out", cmp_out, "comparison CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    std::ofstream file;
    if (*run) {
      const Scenario s = run_args.build();
      const Metrics m = run_experiment(s);
      write_metrics_csv(m, open_or(file, run_out, out));
      err << to_string(s.controller) << ": ";
      if (m.avg_travel_time_s) err << "avg travel time " << *m.avg_travel_time_s << " s";
      else err << "empty run (no vehicles)";
      err << ", mean balance " << m.mean_balance << ", mean decision " << m.mean_decision_ms << " ms\n";
    } else if (*gen_grid) {
      open_or(file, grid_out, out) << to_json(grid_args.load()).dump(2) << '\n';
    } else if (*gen_flow) {
      const RoadNetwork net = flow_net.load();
      const auto flow = generate_uniform_flow(net, flow_rate, flow_duration, flow_seed);
      open_or(file, flow_out, out) << flow_to_json(net, flow).dump(1) << '\n';
    } else if (*comm) {
      const RoadNetwork net = delay_net.load();
      const CoordinationGraph cg = build_cg(QueueState::zeros(net), net, TurningModel::uniform(net));
      const DagOrder order = min_diameter_dag(cg);
      const DelayModel model{delay_mu, 3.0, delay_seed, delay_nodes};
      out << "agents,depth,passes,mu_ms,nodes,delay_ms\n"
          << cg.agent_count() << ',' << order.depth << ',' << delay_passes << ',' << delay_mu << ',' << delay_nodes << ','
          << simulate_comm_delay(cg, order, delay_passes, model) << '\n';
    } else if (*cmp) {
      const auto rows = compare_controllers(cmp_args.build());
      write_comparison_csv(rows, open_or(file, cmp_out, out));
    }
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sigcoord
