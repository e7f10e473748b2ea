#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"

using namespace sigcoord;

namespace {

Scenario grid_scenario(std::size_t rows, std::size_t cols, double rate, double duration_s, ControllerKind k,
                       std::uint64_t seed = 0) {
  Scenario s;
  s.network = build_grid(rows, cols, 300, 300);
  s.flow = generate_uniform_flow(s.network, rate, duration_s, seed);
  s.sim.horizon = static_cast<std::size_t>(duration_s / s.sim.tau_s);
  s.sim.seed = seed;
  s.controller = k;
  return s;
}

double delay_ms(std::size_t n, double mu, std::size_t nodes, std::uint64_t seed = 0) {
  const CoordinationGraph cg = oracle::grid_graph(n, n);
  return simulate_comm_delay(cg, min_diameter_dag(cg), 2, DelayModel{mu, 3.0, seed, nodes});
}

}  // namespace

TEST(Controllers, NamesRoundTrip) {
  for (ControllerKind k : kAllControllers) EXPECT_EQ(parse_controller(to_string(k)), k);
  EXPECT_FALSE(parse_controller("greedy").has_value());
}

TEST(RunExperiment, NoVehiclesLeavesTravelTimeUndefined) {
  Scenario s;
  s.network = build_grid(2, 2, 300, 300);
  s.sim.horizon = 20;
  s.controller = ControllerKind::MaxPressure;
  const Metrics m = run_experiment(s);
  EXPECT_FALSE(m.avg_travel_time_s.has_value());
  EXPECT_EQ(m.series.size(), 20u);
  EXPECT_DOUBLE_EQ(m.mean_balance, 0.0);
}

TEST(RunExperiment, DeterministicApartFromTiming) {
  const Scenario s = grid_scenario(3, 3, 0.8, 600, ControllerKind::EMC, 4);
  const Metrics a = run_experiment(s), b = run_experiment(s);
  ASSERT_TRUE(a.avg_travel_time_s && b.avg_travel_time_s);
  EXPECT_DOUBLE_EQ(*a.avg_travel_time_s, *b.avg_travel_time_s);
  EXPECT_DOUBLE_EQ(a.mean_balance, b.mean_balance);
  EXPECT_EQ(a.throughput, b.throughput);
}

TEST(RunExperiment, EveryControllerMovesTraffic) {
  for (ControllerKind k : kAllControllers) {
    const Metrics m = run_experiment(grid_scenario(2, 2, 0.5, 600, k));
    ASSERT_TRUE(m.avg_travel_time_s) << to_string(k);
    EXPECT_GT(m.throughput, 0u) << to_string(k);
    EXPECT_GT(*m.avg_travel_time_s, 0.0);
  }
}

TEST(RunExperiment, MacroModeRuns) {
  Scenario s = grid_scenario(3, 3, 0.8, 600, ControllerKind::NLCoor);
  s.sim.mode = SimMode::Macro;
  const Metrics m = run_experiment(s);
  ASSERT_TRUE(m.avg_travel_time_s);
  EXPECT_GT(*m.avg_travel_time_s, 0.0);
  EXPECT_EQ(m.series.size(), 60u);
}

TEST(RunExperiment, RejectsBadConfig) {
  Scenario s;
  s.network = build_grid(1, 1, 300, 300);
  s.sim.horizon = 0;
  EXPECT_THROW(run_experiment(s), std::invalid_argument);
}

TEST(RunExperiment, BudgetOverrunIsAnError) {
  Scenario s = grid_scenario(5, 5, 0.5, 100, ControllerKind::NLCoor);
  s.emc.budget = CoorBudget::WallClock(1e-6);
  EXPECT_THROW(run_experiment(s), BudgetError);
}

TEST(RunExperiment, DelayRecordedOnlyForCoordinatingControllers) {
  Scenario s = grid_scenario(3, 3, 0.5, 200, ControllerKind::MaxPressure);
  s.delay = DelayModel{20.0, 3.0, 1, 0};
  EXPECT_DOUBLE_EQ(run_experiment(s).mean_comm_delay_ms, 0.0);
  s.controller = ControllerKind::EMC;
  EXPECT_GT(run_experiment(s).mean_comm_delay_ms, 0.0);
}

TEST(CommDelay, ZeroMeanIsNearlyFree) {
  // Only the positive half of N(0, 3^2) is charged.
  EXPECT_LT(delay_ms(4, 0.0, 0), 2 * 6 * 3.0 * 4);
}

TEST(CommDelay, MonotoneInMeanAndGridSize) {
  double prev = 0.0;
  for (double mu : {0.0, 5.0, 10.0, 20.0, 40.0}) {
    const double d = delay_ms(15, mu, 10);
    EXPECT_GT(d, prev) << mu;
    prev = d;
  }
  prev = 0.0;
  for (std::size_t n : {3, 4, 15, 20}) {
    const double d = delay_ms(n, 20.0, 10);
    EXPECT_GT(d, prev) << n;
    prev = d;
  }
}

TEST(CommDelay, TwentyByTwentyOnTenHosts) {
  const double d = delay_ms(20, 20.0, 10);
  EXPECT_NEAR(d, 1230.0, 0.5 * 1230.0);
}

TEST(CommDelay, SingleHostChargesNothing) { EXPECT_DOUBLE_EQ(delay_ms(4, 20.0, 1), 0.0); }

TEST(CommDelay, NegativeMeanRejected) {
  const CoordinationGraph cg = oracle::grid_graph(2, 2);
  EXPECT_THROW(simulate_comm_delay(cg, min_diameter_dag(cg), 1, DelayModel{-1.0, 3.0, 0, 0}), std::invalid_argument);
}

TEST(Csv, MetricsAndComparisonColumns) {
  const auto rows = compare_controllers(grid_scenario(2, 2, 0.3, 300, ControllerKind::EMC));
  ASSERT_EQ(rows.size(), 4u);
  std::ostringstream cmp, met;
  write_comparison_csv(rows, cmp);
  write_metrics_csv(rows[0].metrics, met);
  EXPECT_EQ(cmp.str().rfind("controller,avg_travel_time_s,mean_balance,mean_decision_ms\n", 0), 0u);
  EXPECT_NE(cmp.str().find("\nmaxpressure,"), std::string::npos);
  EXPECT_EQ(met.str().rfind("period,total_queue,balance,decision_ms,comm_delay_ms\n", 0), 0u);
  const std::string series = met.str();
  EXPECT_EQ(std::count(series.begin(), series.end(), '\n'), 31);
}

TEST(Compare, CoordinationBeatsBaselinesOnFourByFour) {
  const auto rows = compare_controllers(grid_scenario(4, 4, 1.76, 3600, ControllerKind::EMC));
  std::map<ControllerKind, Metrics> by;
  for (const auto& r : rows) by[r.controller] = r.metrics;
  EXPECT_LE(by[ControllerKind::NLCoor].mean_balance, by[ControllerKind::MaxPressure].mean_balance);
  EXPECT_LT(*by[ControllerKind::EMC].avg_travel_time_s, *by[ControllerKind::FixedTime].avg_travel_time_s);
  EXPECT_LT(*by[ControllerKind::MaxPressure].avg_travel_time_s, *by[ControllerKind::FixedTime].avg_travel_time_s);
}
