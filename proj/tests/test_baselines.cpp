#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sigcoord;

namespace {

// Pressure by scanning the raw movement list.
double pressure_oracle(const RoadNetwork& net, const QueueState& s, const TurningModel& t, IntersectionId i, Phase x) {
  const auto& mv = net.movements();
  double p = 0.0;
  for (std::size_t m = 0; m < mv.size(); ++m) {
    if (mv[m].intersection != i || mv[m].phase != x) continue;
    double down = 0.0;
    for (std::size_t d = 0; d < mv.size(); ++d)
      if (mv[d].from == mv[m].to) down += t.r[d] * s.q[d];
    p += mv[m].sat_flow * (s.q[m] - down);
  }
  return p;
}

}  // namespace

TEST(FixedTime, CyclesThroughPhases) {
  const FixedTimeConfig cfg;
  EXPECT_EQ(fixed_time(5, cfg, 3), JointAssignment(3, Phase::WELeft));
  const Phase want[] = {Phase::WEStraight, Phase::WELeft, Phase::SNStraight, Phase::SNLeft};
  for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(fixed_time(t, cfg, 1)[0], want[t % 4]) << t;
}

TEST(FixedTime, PhaseDurationStretchesCycle) {
  FixedTimeConfig cfg;
  cfg.phase_duration = 3;
  EXPECT_EQ(fixed_time(2, cfg, 1)[0], Phase::WEStraight);
  EXPECT_EQ(fixed_time(3, cfg, 1)[0], Phase::WELeft);
  EXPECT_EQ(fixed_time(12, cfg, 1)[0], Phase::WEStraight);
}

TEST(FixedTime, ConfigErrors) {
  FixedTimeConfig cfg;
  cfg.phase_duration = 0;
  EXPECT_THROW(fixed_time(0, cfg, 1), std::invalid_argument);
  cfg = FixedTimeConfig{};
  cfg.sequence.clear();
  EXPECT_THROW(fixed_time(0, cfg, 1), std::invalid_argument);
}

TEST(Pressure, ExampleValues) {
  const oracle::TwoIntersections ex;
  const QueueState s = ex.state();
  EXPECT_DOUBLE_EQ(phase_pressure(ex.i, Phase::WEStraight, s, ex.net, ex.turning()), 20.0);
  EXPECT_DOUBLE_EQ(phase_pressure(ex.i, Phase::WELeft, s, ex.net, ex.turning()), 10.0);
  EXPECT_DOUBLE_EQ(phase_pressure(ex.i, Phase::SNStraight, s, ex.net, ex.turning()), 0.0);
  EXPECT_DOUBLE_EQ(phase_pressure(ex.j, Phase::WEStraight, s, ex.net, ex.turning()), 0.0);
  EXPECT_EQ(max_pressure(s, ex.net, ex.turning())[ex.i.index()], Phase::WEStraight);
}

TEST(Pressure, DownstreamQueueReducesPressure) {
  const oracle::TwoIntersections ex;
  QueueState s = ex.state();
  s.at(ex.net, ex.l2, ex.l4) = 10;
  EXPECT_DOUBLE_EQ(phase_pressure(ex.i, Phase::WEStraight, s, ex.net, ex.turning()), -30.0);
  EXPECT_EQ(max_pressure(s, ex.net, ex.turning())[ex.i.index()], Phase::WELeft);
}

TEST(Pressure, MixedPhaseMatchesHandSum) {
  const RoadNetwork net = build_grid(2, 2, 300, 300);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const QueueState s = oracle::random_state(net, rng);
    const TurningModel t = oracle::random_turning(net, rng);
    for (std::size_t i = 0; i < 4; ++i)
      for (Phase p : kAllPhases)
        ASSERT_NEAR(phase_pressure(IntersectionId{i}, p, s, net, t), pressure_oracle(net, s, t, IntersectionId{i}, p), 1e-9);
  }
}

TEST(MaxPressure, EmptyNetworkPicksFirstPhase) {
  const RoadNetwork net = build_grid(3, 3, 300, 300);
  EXPECT_EQ(max_pressure(QueueState::zeros(net), net, TurningModel::uniform(net)), JointAssignment(9, Phase::WEStraight));
}

TEST(MaxPressure, SingleLoadedMovementWins) {
  const RoadNetwork net = build_grid(1, 1, 300, 300);
  for (std::size_t m = 0; m < net.movement_count(); ++m) {
    if (!net.movement(m).phase) continue;
    QueueState s = QueueState::zeros(net);
    s.q[m] = 3;
    EXPECT_EQ(max_pressure(s, net, TurningModel::uniform(net))[0], *net.movement(m).phase);
  }
}

TEST(MaxPressure, MatchesEnumeration) {
  const RoadNetwork net = build_grid(2, 2, 300, 300);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const QueueState s = oracle::random_state(net, rng);
    const TurningModel t = oracle::random_turning(net, rng);
    const JointAssignment x = max_pressure(s, net, t);
    for (std::size_t i = 0; i < 4; ++i) {
      std::size_t best = 0;
      for (std::size_t p = 1; p < kPhaseCount; ++p)
        if (pressure_oracle(net, s, t, IntersectionId{i}, phase_from_index(p)) >
            pressure_oracle(net, s, t, IntersectionId{i}, phase_from_index(best)))
          best = p;
      ASSERT_EQ(x[i], phase_from_index(best));
    }
  }
}

TEST(MaxPressure, DependsOnlyOnLocalQueues) {
  const RoadNetwork net = build_grid(3, 3, 300, 300);
  std::mt19937_64 rng(3);
  const QueueState s = oracle::random_state(net, rng);
  const TurningModel t = oracle::random_turning(net, rng);
  const JointAssignment base = max_pressure(s, net, t);
  const IntersectionId i{4};
  for (std::size_t m = 0; m < net.movement_count(); ++m) {
    const Movement& mv = net.movement(m);
    // Queues at i or on i's output links feed i's pressure; nothing else does.
    const bool local = mv.intersection == i || net.link(mv.from).start == i;
    if (local) continue;
    QueueState p = s;
    p.q[m] += 50;
    ASSERT_EQ(max_pressure(p, net, t)[i.index()], base[i.index()]) << "movement " << m;
  }
}

TEST(MaxPressure, InvariantToScaling) {
  const RoadNetwork net = build_grid(3, 3, 300, 300);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    QueueState s = oracle::random_state(net, rng);
    const TurningModel t = oracle::random_turning(net, rng);
    const JointAssignment base = max_pressure(s, net, t);
    for (double& q : s.q) q *= 2;  // exact in binary, so ties stay ties
    ASSERT_EQ(max_pressure(s, net, t), base);
  }
}
