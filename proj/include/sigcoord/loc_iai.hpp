#pragma once

#include <chrono>
#include <cmath>
#include <optional>

#include "sigcoord/nl_coor.hpp"

namespace sigcoord {

struct EmcConfig {
  CoorBudget budget = CoorBudget::WallClock(3000.0);
  double epsilon = 0.8;  // share of the budget given to network-level coordination
  std::size_t loc_iai_max_sweeps = 4;
};

// Predicted next-period balance of intersection i if it plays x_i while
// every other intersection plays what `x` says.
inline double predicted_local_balance(IntersectionId i, Phase xi, const JointAssignment& x, const QueueState& state,
                                      const RoadNetwork& net, const TurningModel& turning) {
  double b = 0.0;
  for (LinkId l : net.inputs(i)) {
    const Link& link = net.link(l);
    double inflow = 0.0;
    if (link.kind == LinkKind::Entry) {
      inflow = turning.d[l.index()];
    } else if (turning.reaches_next_period(l)) {
      const Phase upstream = x[link.start->index()];
      for (MovementIndex m : net.movements_into(l)) inflow += released(net, m, upstream, state.q[m]);
    }
    for (MovementIndex m : net.movements_from(l)) {
      const double q = state.q[m] + state.arriving(m) - released(net, m, xi, state.q[m]) + inflow * turning.r[m];
      b += q * q;
    }
  }
  return b;
}

// Phase minimising i's own predicted balance with the neighbours fixed at
// `x`. Ties keep x[i], then fall to the lowest phase index.
inline Phase best_response(IntersectionId i, const JointAssignment& x, const QueueState& state, const RoadNetwork& net,
                           const TurningModel& turning) {
  if (x.size() != net.intersection_count())
    throw std::invalid_argument("best_response: neighbour actions must cover every intersection");
  const Phase current = x[i.index()];
  double best_cost = predicted_local_balance(i, current, x, state, net, turning);
  Phase best = current;
  for (Phase p : kAllPhases) {
    if (p == current) continue;
    const double c = predicted_local_balance(i, p, x, state, net, turning);
    if (c < best_cost) {
      best_cost = c;
      best = p;
    }
  }
  return best;
}

struct LocIaiResult {
  JointAssignment assignment;
  std::size_t sweeps = 0;
  bool converged = false;  // last sweep changed nothing
};

// Synchronous best-response sweeps: every agent reacts to its neighbours'
// actions from the previous sweep. Stops on an unchanged sweep, after
// max_sweeps, or when the budget runs out (one sweep per budget round).
inline LocIaiResult loc_iai(const JointAssignment& init, const QueueState& state, const RoadNetwork& net,
                            const TurningModel& turning, BudgetMeter& meter, std::size_t max_sweeps) {
  if (init.size() != net.intersection_count()) throw std::invalid_argument("loc_iai: incomplete initial assignment");
  LocIaiResult res{init, 0, false};
  while (res.sweeps < max_sweeps && !meter.exhausted()) {
    JointAssignment next(res.assignment.size());
    bool changed = false;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = best_response(IntersectionId{i}, res.assignment, state, net, turning);
      changed |= next[i] != res.assignment[i];
    }
    meter.charge();
    ++res.sweeps;
    res.assignment = std::move(next);
    if (!changed) {
      res.converged = true;
      break;
    }
  }
  return res;
}

inline LocIaiResult loc_iai(const JointAssignment& init, const QueueState& state, const RoadNetwork& net,
                            const TurningModel& turning, const CoorBudget& budget, std::size_t max_sweeps = 4) {
  BudgetMeter meter(budget);
  return loc_iai(init, state, net, turning, meter, max_sweeps);
}

struct EmcResult {
  JointAssignment assignment;
  NlCoorResult coordination;
  LocIaiResult improvement;
  double elapsed_ms = 0.0;
};

// Network-level coordination under epsilon of the budget, then local
// improvement under (1 - epsilon) of it. Wall-clock budgets are measured
// from entry, so graph construction counts against the coordination share. Pass a
// precomputed order to skip the DAG construction (topology is static).
inline EmcResult emc_decide(const QueueState& state, const RoadNetwork& net, const TurningModel& turning,
                            const EmcConfig& cfg, const DagOrder* order = nullptr) {
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  using Clock = BudgetMeter::Clock;
  const auto start = Clock::now();

  const bool rounds = cfg.budget.kind == CoorBudget::Kind::Rounds;
  const auto coor_rounds = static_cast<std::size_t>(std::floor(cfg.epsilon * static_cast<double>(cfg.budget.rounds) + 1e-9));
  BudgetMeter coor_meter(rounds ? CoorBudget::Rounds(coor_rounds) : CoorBudget::WallClock(cfg.epsilon * cfg.budget.ms), start);

  const CoordinationGraph cg = build_cg(state, net, turning);
  std::optional<DagOrder> own;
  if (!order) {
    own = min_diameter_dag(cg);
    order = &*own;
  }
  EmcResult res;
  res.coordination = nl_coor(cg, *order, coor_meter);

  // Local improvement gets its own share, counted from when coordination
  // stopped, but never past the overall deadline.
  const auto now = Clock::now();
  const double spent = std::chrono::duration<double, std::milli>(now - start).count();
  BudgetMeter improve_meter(rounds ? CoorBudget::Rounds(cfg.budget.rounds - coor_rounds)
                                   : CoorBudget::WallClock(std::min((1.0 - cfg.epsilon) * cfg.budget.ms,
                                                                    std::max(0.0, cfg.budget.ms - spent))),
                            now);
  res.improvement = loc_iai(res.coordination.assignment, state, net, turning, improve_meter, cfg.loc_iai_max_sweeps);
  res.assignment = res.improvement.assignment;
  res.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return res;
}

}  // namespace sigcoord
