#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"

using namespace sigcoord;

namespace {

// First movement at intersection 0 of a 1x1 grid that `p` serves.
MovementIndex movement_with_phase(const RoadNetwork& net, Phase p) {
  for (MovementIndex m = 0; m < net.movement_count(); ++m)
    if (net.movement(m).phase == p) return m;
  throw std::logic_error("no such movement");
}

Vehicle make_vehicle(std::uint64_t id, double depart, std::vector<LinkId> route) {
  Vehicle v;
  v.id = id;
  v.depart_s = depart;
  v.origin = route.front();
  v.destination = route.back();
  v.route = std::move(route);
  return v;
}

}  // namespace

TEST(QueueUpdate, DischargeLimitedBySaturationFlow) {
  const RoadNetwork net = build_grid(1, 1, 300, 300, 3);
  const MovementIndex m = movement_with_phase(net, Phase::WEStraight);
  QueueState s = QueueState::zeros(net);
  s.q[m] = 5;
  const auto x = JointAssignment{Phase::WEStraight};
  const TurningModel t = TurningModel::uniform(net);
  EXPECT_DOUBLE_EQ(predict_next_queues(s, x, net, t).q[m], 2.0);
  EXPECT_DOUBLE_EQ(macro_step(s, x, net, t).q[m], 2.0);
}

TEST(QueueUpdate, DischargeClampedAtQueueLength) {
  const RoadNetwork net = build_grid(1, 1, 300, 300, 3);
  const MovementIndex m = movement_with_phase(net, Phase::WEStraight);
  QueueState s = QueueState::zeros(net);
  s.q[m] = 2;
  EXPECT_DOUBLE_EQ(predict_next_queues(s, {Phase::WEStraight}, net, TurningModel::uniform(net)).q[m], 0.0);
}

TEST(QueueUpdate, RedMovementKeepsItsQueue) {
  const RoadNetwork net = build_grid(1, 1, 300, 300);
  const MovementIndex m = movement_with_phase(net, Phase::WEStraight);
  QueueState s = QueueState::zeros(net);
  s.q[m] = 7;
  EXPECT_DOUBLE_EQ(predict_next_queues(s, {Phase::SNLeft}, net, TurningModel::uniform(net)).q[m], 7.0);
}

TEST(QueueUpdate, ZeroQueuesNoDemandStayZero) {
  const RoadNetwork net = build_grid(2, 2, 300, 300);
  const QueueState next = predict_next_queues(QueueState::zeros(net), JointAssignment(4, Phase::WELeft), net,
                                              TurningModel::uniform(net));
  EXPECT_DOUBLE_EQ(next.total(), 0.0);
  EXPECT_EQ(next.period, 1u);
}

TEST(QueueUpdate, DecisionSizeMismatchThrows) {
  const RoadNetwork net = build_grid(2, 2, 300, 300);
  const QueueState s = QueueState::zeros(net);
  const TurningModel t = TurningModel::uniform(net);
  EXPECT_THROW(predict_next_queues(s, JointAssignment(3, Phase::WELeft), net, t), std::invalid_argument);
  EXPECT_THROW(macro_step(s, JointAssignment(5, Phase::WELeft), net, t), std::invalid_argument);
  MicroSimulator sim(net, {}, {});
  EXPECT_THROW(sim.step(JointAssignment(1, Phase::WELeft)), std::invalid_argument);
}

TEST(QueueUpdate, ExampleLeftTurnClearsTheExitQueue) {
  const oracle::TwoIntersections ex;
  const QueueState next = macro_step(ex.state(), ex.at_i(Phase::WELeft), ex.net, ex.turning());
  EXPECT_DOUBLE_EQ(next.at(ex.net, ex.l1, ex.l3), 0.0);
  EXPECT_DOUBLE_EQ(next.at(ex.net, ex.l1, ex.l2), 4.0);
  EXPECT_DOUBLE_EQ(next.total(), 4.0);
}

TEST(QueueUpdate, ExampleLeftTurnMicro) {
  const oracle::TwoIntersections ex;
  std::vector<Vehicle> flow;
  for (std::uint64_t k = 0; k < 4; ++k) flow.push_back(make_vehicle(k, 0.0, {ex.l1, ex.l2, ex.l4}));
  for (std::uint64_t k = 4; k < 6; ++k) flow.push_back(make_vehicle(k, 0.0, {ex.l1, ex.l3}));
  SimConfig cfg;
  MicroSimulator sim(ex.net, cfg, flow);
  sim.step(ex.at_i(Phase::SNLeft));  // vehicles join their queues at the period boundary
  EXPECT_DOUBLE_EQ(sim.state().at(ex.net, ex.l1, ex.l2), 4.0);
  EXPECT_DOUBLE_EQ(sim.state().at(ex.net, ex.l1, ex.l3), 2.0);
  sim.step(ex.at_i(Phase::WELeft));
  EXPECT_EQ(sim.exited(), 2u);
  EXPECT_DOUBLE_EQ(sim.state().at(ex.net, ex.l1, ex.l2), 4.0);
  EXPECT_DOUBLE_EQ(sim.state().at(ex.net, ex.l1, ex.l3), 0.0);
  for (std::uint64_t k = 4; k < 6; ++k) EXPECT_DOUBLE_EQ(*sim.vehicles()[k].exit_s, 20.0);
}

TEST(Predict, ExampleStraightPhase) {
  const oracle::TwoIntersections ex;
  const QueueState next = predict_next_queues(ex.state(), ex.at_i(Phase::WEStraight), ex.net, ex.turning());
  EXPECT_DOUBLE_EQ(next.at(ex.net, ex.l1, ex.l3), 2.0);
  EXPECT_DOUBLE_EQ(next.at(ex.net, ex.l2, ex.l4), 4.0);
  EXPECT_DOUBLE_EQ(next.at(ex.net, ex.l1, ex.l2), 0.0);
  EXPECT_DOUBLE_EQ(balance_index(next), 20.0);
}

TEST(Predict, MatchesMacroStepOnRandomStates) {
  const RoadNetwork net = build_grid(2, 2, 100, 100);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const QueueState s = oracle::random_state(net, rng);
    const TurningModel t = oracle::random_turning(net, rng);
    const JointAssignment x = oracle::random_assignment(net.intersection_count(), rng);
    const QueueState a = predict_next_queues(s, x, net, t);
    const QueueState b = macro_step(s, x, net, t);
    for (std::size_t m = 0; m < net.movement_count(); ++m) ASSERT_NEAR(a.q[m], b.q[m], 1e-9) << "state " << k;
  }
}

TEST(Predict, MatchesReferenceScanWithTransitAndLags) {
  const RoadNetwork net = build_grid(3, 2, 100, 300);  // horizontal links take 1 period, vertical 3
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    QueueState s = oracle::random_state(net, rng);
    s.transit.assign(2, std::vector<double>(net.movement_count(), 0.0));
    for (auto& row : s.transit)
      for (double& v : row) v = std::uniform_int_distribution<int>(0, 3)(rng);
    TurningModel t = oracle::random_turning(net, rng);
    t.set_lags(net, 10.0);
    const JointAssignment x = oracle::random_assignment(net.intersection_count(), rng);
    const auto expected = oracle::next_queues(net, s, x, t);
    const QueueState got = predict_next_queues(s, x, net, t);
    for (std::size_t m = 0; m < net.movement_count(); ++m) ASSERT_NEAR(got.q[m], expected[m], 1e-9);
  }
}

TEST(Predict, IteratingReproducesMacroTrajectory) {
  const RoadNetwork net = build_grid(3, 3, 100, 100);
  std::mt19937_64 rng(3);
  TurningModel t = oracle::random_turning(net, rng);
  QueueState a = oracle::random_state(net, rng), b = a;
  for (int step = 0; step < 30; ++step) {
    const JointAssignment x = oracle::random_assignment(net.intersection_count(), rng);
    a = predict_next_queues(a, x, net, t);
    b = macro_step(b, x, net, t);
    for (std::size_t m = 0; m < net.movement_count(); ++m) ASSERT_NEAR(a.q[m], b.q[m], 1e-9);
  }
}

TEST(Predict, SlowLinksHoldReleasedVehiclesInTransit) {
  const RoadNetwork net = build_grid(1, 2, 300, 300);  // 3 periods per link at 10 m/s
  TurningModel t = TurningModel::uniform(net);
  t.set_lags(net, 10.0);
  EXPECT_EQ(t.lag_of(LinkId{0}), 3u);
  QueueState s = QueueState::zeros(net);
  const LinkId east = LinkId{0};  // intersection 0 -> 1
  ASSERT_EQ(net.link(east).start->index(), 0u);
  MovementIndex feeder = 0;
  for (MovementIndex m : net.movements_into(east))
    if (net.movement(m).phase == Phase::WEStraight) feeder = m;
  s.q[feeder] = 4;
  const JointAssignment x{Phase::WEStraight, Phase::SNLeft};
  EXPECT_DOUBLE_EQ(predict_next_queues(s, x, net, t).total(), 0.0);
  QueueState m = macro_step(s, x, net, t);
  EXPECT_DOUBLE_EQ(m.total(), 0.0);
  EXPECT_DOUBLE_EQ(m.in_transit(), 4.0);
  m = macro_step(m, x, net, t);
  EXPECT_DOUBLE_EQ(m.total(), 0.0);
  m = macro_step(m, x, net, t);
  EXPECT_DOUBLE_EQ(m.total(), 4.0);
  EXPECT_DOUBLE_EQ(m.in_transit(), 0.0);
}

TEST(Balance, Values) {
  QueueState s;
  s.q = {4};
  EXPECT_DOUBLE_EQ(balance_index(s), 16.0);
  s.q = {4, 2};
  EXPECT_DOUBLE_EQ(balance_index(s), 20.0);
  s.q = {};
  EXPECT_DOUBLE_EQ(balance_index(s), 0.0);
}

TEST(Balance, NetworkIsSumOfIntersections) {
  const RoadNetwork net = build_grid(3, 3, 300, 300);
  std::mt19937_64 rng(9);
  const QueueState s = oracle::random_state(net, rng);
  double sum = 0.0;
  for (std::size_t i = 0; i < net.intersection_count(); ++i) sum += balance_index(s, net, IntersectionId{i});
  EXPECT_DOUBLE_EQ(sum, balance_index(s));
  EXPECT_DOUBLE_EQ(sum, oracle::sum_of_squares(s.q));
}

TEST(EstimateTurning, CountsRoutesAndFallsBackToUniform) {
  const RoadNetwork net = build_grid(1, 1, 300, 300);
  const LinkId entry = net.entry_links().front();
  const auto& ms = net.movements_from(entry);
  ASSERT_EQ(ms.size(), 3u);
  const LinkId h1 = net.movement(ms[0]).to, h2 = net.movement(ms[1]).to;
  std::vector<Vehicle> flow;
  for (std::uint64_t k = 0; k < 3; ++k) flow.push_back(make_vehicle(k, 1.0 * k, {entry, h1}));
  flow.push_back(make_vehicle(3, 4.0, {entry, h2}));
  MicroSimulator sim(net, {}, flow);
  const TurningModel t = sim.estimate_turning();
  EXPECT_DOUBLE_EQ(t.r[ms[0]], 0.75);
  EXPECT_DOUBLE_EQ(t.r[ms[1]], 0.25);
  EXPECT_DOUBLE_EQ(t.r[ms[2]], 0.0);
  EXPECT_DOUBLE_EQ(t.d[entry.index()], 4.0);
  const LinkId other = net.entry_links().back();
  for (MovementIndex m : net.movements_from(other)) EXPECT_DOUBLE_EQ(t.r[m], 1.0 / 3.0);

  // Once queued, the same four vehicles give the same split.
  sim.step({Phase::SNLeft});
  const TurningModel later = sim.estimate_turning();
  EXPECT_DOUBLE_EQ(later.d[entry.index()], 0.0);
  EXPECT_DOUBLE_EQ(later.r[ms[0]] + later.r[ms[1]] + later.r[ms[2]], 1.0);
}

TEST(EstimateTurning, AllToOneLink) {
  const RoadNetwork net = build_grid(1, 1, 300, 300);
  const LinkId entry = net.entry_links().front();
  const MovementIndex m = net.movements_from(entry)[1];
  std::vector<Vehicle> flow;
  for (std::uint64_t k = 0; k < 4; ++k) flow.push_back(make_vehicle(k, 0.0, {entry, net.movement(m).to}));
  MicroSimulator sim(net, {}, flow);
  EXPECT_DOUBLE_EQ(sim.estimate_turning().r[m], 1.0);
}

TEST(Flow, VehicleCountsForGridScenarios) {
  EXPECT_EQ(generate_uniform_flow(build_grid(4, 4, 300, 300), 1.76, 3600, 0).size(), 6336u);
  EXPECT_EQ(generate_uniform_flow(build_grid(20, 20, 300, 300), 0.77, 3600, 0).size(), 2772u);
}

TEST(Flow, DeterministicPerSeed) {
  const RoadNetwork net = build_grid(3, 3, 300, 300);
  EXPECT_EQ(generate_uniform_flow(net, 0.5, 600, 4), generate_uniform_flow(net, 0.5, 600, 4));
  EXPECT_NE(generate_uniform_flow(net, 0.5, 600, 4), generate_uniform_flow(net, 0.5, 600, 5));
}

TEST(Flow, EvenSpacingRoundRobinOriginsShortestRoutes) {
  const RoadNetwork net = build_grid(3, 4, 300, 300);
  const auto flow = generate_uniform_flow(net, 1.0, 300, 7);
  ASSERT_EQ(flow.size(), 300u);
  std::map<std::uint32_t, int> per_origin;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    EXPECT_DOUBLE_EQ(flow[k].depart_s, static_cast<double>(k));
    ++per_origin[flow[k].origin.value];
    EXPECT_EQ(net.link(flow[k].origin).kind, LinkKind::Entry);
    EXPECT_EQ(net.link(flow[k].destination).kind, LinkKind::Exit);
    for (std::size_t s = 0; s + 1 < flow[k].route.size(); ++s)
      EXPECT_TRUE(net.find_movement(flow[k].route[s], flow[k].route[s + 1]));
  }
  EXPECT_EQ(per_origin.size(), net.entry_links().size());
  for (const auto& [o, c] : per_origin) EXPECT_LE(std::abs(c - 300 / 14), 1);

  // Route length equals BFS hop distance over movements.
  for (const Vehicle& v : flow) {
    std::map<std::uint32_t, std::size_t> dist{{v.origin.value, 0}};
    std::vector<LinkId> frontier{v.origin};
    while (!dist.count(v.destination.value)) {
      std::vector<LinkId> next;
      for (LinkId l : frontier)
        for (const Movement& m : net.movements())
          if (m.from == l && !dist.count(m.to.value)) {
            dist[m.to.value] = dist[l.value] + 1;
            next.push_back(m.to);
          }
      frontier = next;
    }
    EXPECT_EQ(v.route.size(), dist[v.destination.value] + 1);
  }
}

TEST(Flow, Errors) {
  const RoadNetwork net = build_grid(2, 2, 300, 300);
  EXPECT_THROW(generate_uniform_flow(net, 0.0, 100, 0), std::invalid_argument);
  EXPECT_THROW(generate_uniform_flow(net, -1.0, 100, 0), std::invalid_argument);
  const RoadNetwork closed({{"a", 0, 0}}, {}, {});
  EXPECT_THROW(generate_uniform_flow(closed, 1.0, 100, 0), std::invalid_argument);
}

TEST(Flow, JsonRoundTripAndRateSpec) {
  const RoadNetwork net = build_grid(2, 2, 300, 300);
  const auto flow = generate_uniform_flow(net, 0.3, 200, 2);
  const auto back = flow_from_json(net, flow_to_json(net, flow));
  ASSERT_EQ(back.size(), flow.size());
  for (std::size_t k = 0; k < flow.size(); ++k) {
    EXPECT_EQ(back[k].origin, flow[k].origin);
    EXPECT_EQ(back[k].destination, flow[k].destination);
    EXPECT_EQ(back[k].route.front(), flow[k].origin);
    EXPECT_EQ(back[k].route.back(), flow[k].destination);
  }
  const nlohmann::json spec{{"rate_vps", 0.3}, {"duration_s", 200}, {"seed", 2}};
  EXPECT_EQ(flow_from_json(net, spec), flow);
  EXPECT_THROW(flow_from_json(net, nlohmann::json{{"rate_vps", 1}}), LoadError);
  EXPECT_THROW(flow_from_json(net, nlohmann::json::parse(R"([{"origin":"x","destination":"y","depart_s":0}])")), LoadError);
  EXPECT_THROW(load_flow(net, "/nonexistent/flow.json"), LoadError);
}

TEST(Metrics, MeanTravelTime) {
  std::vector<Vehicle> vs(2);
  vs[0].depart_s = 0;
  vs[0].exit_s = 100;
  vs[1].depart_s = 50;
  vs[1].exit_s = 250;
  EXPECT_DOUBLE_EQ(travel_time_metrics(vs, 3600).avg_travel_time_s, 150.0);
  EXPECT_EQ(travel_time_metrics(vs, 3600).throughput, 2u);
}

TEST(Metrics, UnfinishedVehicleCountsElapsedTime) {
  std::vector<Vehicle> vs(1);
  vs[0].depart_s = 3500;
  const auto m = travel_time_metrics(vs, 3600);
  EXPECT_DOUBLE_EQ(m.avg_travel_time_s, 100.0);
  EXPECT_EQ(m.in_network, 1u);
}

TEST(Metrics, EmptyVehicleSetIsUndefined) {
  EXPECT_THROW(travel_time_metrics(std::vector<Vehicle>{}, 3600), UndefinedMetricError);
}

TEST(Metrics, SeriesSummary) {
  std::vector<PeriodRecord> series{{1, 3, 5, 0, 0}, {2, 7, 9, 0, 0}};
  std::vector<Vehicle> vs(1);
  vs[0].exit_s = 10;
  const auto m = travel_time_metrics(vs, 20, series);
  EXPECT_DOUBLE_EQ(m.mean_balance, 7.0);
  EXPECT_DOUBLE_EQ(m.max_total_queue, 7.0);
}

TEST(Micro, ConservationAndNonNegativity) {
  const RoadNetwork net = build_grid(3, 3, 300, 150);
  const auto flow = generate_uniform_flow(net, 1.2, 1200, 3);
  MicroSimulator sim(net, {10.0, 150, 3, SimMode::Micro}, flow);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 150; ++t) {
    sim.step(oracle::random_assignment(net.intersection_count(), rng));
    ASSERT_EQ(sim.entered(), sim.exited() + sim.queued() + sim.in_transit()) << "period " << t;
    const QueueState s = sim.state();
    for (double v : s.q) ASSERT_GE(v, 0.0);
    ASSERT_DOUBLE_EQ(s.total() + s.in_transit(), static_cast<double>(sim.queued() + sim.in_transit()));
  }
  EXPECT_GT(sim.exited(), 0u);
}

TEST(Micro, TraversalDelayIsCeilLengthOverSpeedTau) {
  const RoadNetwork net = build_grid(1, 2, 250, 300);  // 250 m at 10 m/s over 10 s: 3 periods
  const LinkId east = LinkId{0};
  const IntersectionId a{0};
  LinkId entry{};
  for (LinkId l : net.inputs(a))
    if (net.link(l).kind == LinkKind::Entry && net.find_movement(l, east) &&
        net.movement(*net.find_movement(l, east)).phase == Phase::WEStraight)
      entry = l;
  LinkId exit{};
  for (MovementIndex m : net.movements_from(east))
    if (net.movement(m).phase == Phase::WEStraight) exit = net.movement(m).to;
  MicroSimulator sim(net, {}, {make_vehicle(0, 0.0, {entry, east, exit})});
  const JointAssignment green{Phase::WEStraight, Phase::WEStraight};
  sim.step(green);  // joins entry queue
  sim.step(green);  // released onto the slow link at period 1
  EXPECT_EQ(sim.in_transit(), 1u);
  ASSERT_EQ(sim.state().transit.size(), 2u);
  EXPECT_DOUBLE_EQ(sim.state().transit[1][*net.find_movement(east, exit)], 1.0);
  sim.step(green);
  sim.step(green);
  EXPECT_EQ(sim.in_transit(), 0u);
  EXPECT_EQ(sim.queued(), 1u);
  sim.step(green);
  EXPECT_EQ(sim.exited(), 1u);
  EXPECT_DOUBLE_EQ(*sim.vehicles()[0].exit_s, 50.0);
}

TEST(Macro, MonotoneServiceEmptiesEveryQueue) {
  // Every movement green (phases stripped) and saturation flow above any
  // queue: one step moves every queued vehicle into transit or out.
  const RoadNetwork grid = build_grid(3, 3, 300, 300, 50, 50);
  auto mvs = grid.movements();
  for (auto& m : mvs) m.phase.reset();
  const RoadNetwork net(grid.intersections(), grid.links(), mvs);
  std::mt19937_64 rng(2);
  const QueueState s = oracle::random_state(net, rng);
  TurningModel t = TurningModel::uniform(net);
  t.set_lags(net, 10.0);
  const QueueState next = macro_step(s, JointAssignment(9, Phase::WEStraight), net, t);
  double onto_internal = 0.0;
  for (std::size_t m = 0; m < net.movement_count(); ++m)
    if (net.link(net.movement(m).to).kind == LinkKind::Internal) onto_internal += s.q[m];
  EXPECT_DOUBLE_EQ(next.total(), 0.0);
  EXPECT_NEAR(next.in_transit(), onto_internal, 1e-9);
}

TEST(Micro, MacroAgreesOnSingleRouteFlow) {
  const RoadNetwork net = build_grid(1, 3, 200, 300);
  // West entry of intersection 0, straight through to the east exit of 2.
  LinkId entry{};
  for (LinkId l : net.inputs(IntersectionId{0}))
    if (net.link(l).kind == LinkKind::Entry)
      for (MovementIndex m : net.movements_from(l))
        if (net.movement(m).phase == Phase::WEStraight && net.link(net.movement(m).to).kind == LinkKind::Internal) entry = l;
  std::vector<LinkId> route{entry};
  while (net.link(route.back()).kind != LinkKind::Exit)
    for (MovementIndex m : net.movements_from(route.back()))
      if (net.movement(m).phase == Phase::WEStraight) {
        route.push_back(net.movement(m).to);
        break;
      }
  ASSERT_EQ(route.size(), 4u);
  std::vector<Vehicle> flow;
  for (std::uint64_t k = 0; k < 240; ++k) flow.push_back(make_vehicle(k, 1.25 * static_cast<double>(k), route));

  SimConfig cfg{10.0, 60, 0, SimMode::Micro};
  MicroSimulator micro(net, cfg, flow);
  const auto profile = detail::flow_profile(net, flow, cfg);
  QueueState macro = QueueState::zeros(net);
  FixedTimeConfig ft;
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const JointAssignment x = fixed_time(t, ft, net.intersection_count());
    micro.step(x);
    TurningModel turning = profile.turning;
    turning.d = profile.arrivals[t];
    macro = macro_step(macro, x, net, turning);
    const QueueState m = micro.state();
    ASSERT_DOUBLE_EQ(macro.total(), m.total()) << "period " << t;
    ASSERT_DOUBLE_EQ(macro.in_transit(), m.in_transit()) << "period " << t;
  }
}
