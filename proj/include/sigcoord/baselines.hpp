#pragma once

#include <vector>

#include "sigcoord/traffic_sim.hpp"

namespace sigcoord {

struct FixedTimeConfig {
  std::vector<Phase> sequence{Phase::WEStraight, Phase::WELeft, Phase::SNStraight, Phase::SNLeft};
  std::size_t phase_duration = 1;  // periods
};

// Same phase everywhere: sequence[(period / duration) mod |sequence|].
inline JointAssignment fixed_time(std::size_t period, const FixedTimeConfig& cfg, std::size_t intersections) {
  if (cfg.sequence.empty()) throw std::invalid_argument("fixed-time sequence is empty");
  if (cfg.phase_duration == 0) throw std::invalid_argument("fixed-time phase duration must be >= 1");
  return JointAssignment(intersections, cfg.sequence[(period / cfg.phase_duration) % cfg.sequence.size()]);
}

// Sum of f(l,h) * (q(l,h) - sum_p r(h,p) q(h,p)) over the phased movements
// that x activates. Exit links have no downstream queue. Right turns are
// always served and are left out.
inline double phase_pressure(IntersectionId i, Phase x, const QueueState& state, const RoadNetwork& net,
                             const TurningModel& turning) {
  double p = 0.0;
  for (MovementIndex m : net.movements_at(i)) {
    const Movement& mv = net.movement(m);
    if (!mv.phase || *mv.phase != x) continue;
    double downstream = 0.0;
    for (MovementIndex d : net.movements_from(mv.to)) downstream += turning.r[d] * state.q[d];
    p += mv.sat_flow * (state.q[m] - downstream);
  }
  return p;
}

// Each intersection independently takes its maximum-pressure phase; ties go
// to the lowest phase index.
inline JointAssignment max_pressure(const QueueState& state, const RoadNetwork& net, const TurningModel& turning) {
  JointAssignment x(net.intersection_count(), Phase::WEStraight);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = phase_pressure(IntersectionId{i}, Phase::WEStraight, state, net, turning);
    for (std::size_t k = 1; k < kPhaseCount; ++k) {
      const double p = phase_pressure(IntersectionId{i}, phase_from_index(k), state, net, turning);
      if (p > best) {
        best = p;
        x[i] = phase_from_index(k);
      }
    }
  }
  return x;
}

}  // namespace sigcoord
