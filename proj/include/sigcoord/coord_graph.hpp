#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "sigcoord/traffic_sim.hpp"

namespace sigcoord {

// Pairwise cost table of one edge {a, b}, a < b, indexed [x_a][x_b].
using PairCosts = std::array<double, kPhaseCount * kPhaseCount>;

struct CgEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  PairCosts cost{};

  double at(Phase xa, Phase xb) const { return cost[phase_index(xa) * kPhaseCount + phase_index(xb)]; }
  double& at(Phase xa, Phase xb) { return cost[phase_index(xa) * kPhaseCount + phase_index(xb)]; }
};

// An edge as seen from one of its endpoints.
struct Incidence {
  std::size_t neighbor = 0;
  std::size_t edge = 0;
};

// Agents are dense indices 0..n-1; for a CG built from a road network agent
// i controls IntersectionId{i}. Every agent has the four-phase domain.
class CoordinationGraph {
 public:
  CoordinationGraph() = default;
  explicit CoordinationGraph(std::size_t agents) : unary_(agents, PhaseCosts{}), adjacency_(agents) {}

  std::size_t agent_count() const { return unary_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::size_t add_edge(std::size_t u, std::size_t v) {
    if (u == v || u >= agent_count() || v >= agent_count()) throw std::invalid_argument("add_edge: bad endpoints");
    if (find_edge(u, v)) throw std::invalid_argument("add_edge: duplicate edge");
    const std::size_t e = edges_.size();
    edges_.push_back({std::min(u, v), std::max(u, v), {}});
    adjacency_[u].push_back({v, e});
    adjacency_[v].push_back({u, e});
    return e;
  }

  std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const {
    for (const Incidence& inc : adjacency_.at(u))
      if (inc.neighbor == v) return inc.edge;
    return std::nullopt;
  }

  const PhaseCosts& unary(std::size_t i) const { return unary_.at(i); }
  PhaseCosts& unary(std::size_t i) { return unary_.at(i); }
  const CgEdge& edge(std::size_t e) const { return edges_.at(e); }
  CgEdge& edge(std::size_t e) { return edges_.at(e); }
  const std::vector<CgEdge>& edges() const { return edges_; }
  const std::vector<Incidence>& incident(std::size_t i) const { return adjacency_.at(i); }

  // c_ij(x_i, x_j) looked up from agent i's side of edge e.
  double pair_cost(std::size_t e, std::size_t i, Phase xi, Phase xj) const {
    const CgEdge& ed = edges_[e];
    return ed.a == i ? ed.at(xi, xj) : ed.at(xj, xi);
  }

 private:
  std::vector<PhaseCosts> unary_;
  std::vector<CgEdge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

namespace detail {

// Sum over movements (l,h) of link l of the squared predicted queue, given
// the phase at l's end intersection and the signal-dependent inflow into l.
inline double link_balance(const RoadNetwork& net, const QueueState& state, const TurningModel& turning, LinkId l,
                           Phase end_phase, double inflow) {
  double b = 0.0;
  for (MovementIndex m : net.movements_from(l)) {
    const double q = state.q[m] + state.arriving(m) - released(net, m, end_phase, state.q[m]) + inflow * turning.r[m];
    b += q * q;
  }
  return b;
}

// Vehicles released into internal link l by its start intersection under
// phase x that queue on l by the next period. Every movement feeding l is
// controlled by start(l).
inline double link_inflow(const RoadNetwork& net, const QueueState& state, const TurningModel& turning, LinkId l,
                          Phase start_phase) {
  double in = 0.0;
  if (!turning.reaches_next_period(l)) return in;
  for (MovementIndex m : net.movements_into(l)) in += released(net, m, start_phase, state.q[m]);
  return in;
}

}  // namespace detail

// Builds the coordination graph for one period. Each internal link i->j
// contributes its predicted next-period balance to c_ij: its inflow depends
// only on x_i and its discharge only on x_j, so the table is exact. A link
// that takes longer than a period to cross still gets an edge table, it
// just no longer varies with x_i. Entry
// link balance goes to the unary cost of the boundary agent it feeds. Exit
// links hold no queues.
inline CoordinationGraph build_cg(const QueueState& state, const RoadNetwork& net, const TurningModel& turning) {
  if (state.q.size() != net.movement_count()) throw std::invalid_argument("queue state does not match the network");
  detail::check_turning(turning, net);
  CoordinationGraph cg(net.intersection_count());
  for (std::size_t i = 0; i < net.intersection_count(); ++i)
    for (IntersectionId j : net.neighbors(IntersectionId{i}))
      if (i < j.index()) cg.add_edge(i, j.index());

  for (std::size_t li = 0; li < net.link_count(); ++li) {
    const LinkId l{li};
    const Link& link = net.link(l);
    if (link.kind == LinkKind::Entry) {
      const std::size_t j = link.end->index();
      for (Phase xj : kAllPhases)
        cg.unary(j)[phase_index(xj)] += detail::link_balance(net, state, turning, l, xj, turning.d[li]);
    } else if (link.kind == LinkKind::Internal) {
      const std::size_t s = link.start->index(), t = link.end->index();
      const std::size_t e = *cg.find_edge(s, t);
      CgEdge& edge = cg.edge(e);
      for (Phase xs : kAllPhases) {
        const double inflow = detail::link_inflow(net, state, turning, l, xs);
        for (Phase xt : kAllPhases) {
          const double b = detail::link_balance(net, state, turning, l, xt, inflow);
          if (edge.a == s) edge.at(xs, xt) += b;
          else edge.at(xt, xs) += b;
        }
      }
    }
  }
  return cg;
}

// Sum of unary costs and edge costs under x.
inline double global_cost(const CoordinationGraph& cg, const JointAssignment& x) {
  if (x.size() != cg.agent_count())
    throw std::invalid_argument("assignment covers " + std::to_string(x.size()) + " agents, graph has " +
                                std::to_string(cg.agent_count()));
  double c = 0.0;
  for (std::size_t i = 0; i < cg.agent_count(); ++i) c += cg.unary(i)[phase_index(x[i])];
  for (const CgEdge& e : cg.edges()) c += e.at(x[e.a], x[e.b]);
  return c;
}

inline constexpr std::size_t kBruteForceAgentCap = 10;

// Exhaustive argmin over all 4^n joint phases. Enumerates in lexicographic
// order (agent 0 most significant) and keeps the first strict minimum.
inline std::pair<JointAssignment, double> brute_force_optimum(const CoordinationGraph& cg) {
  const std::size_t n = cg.agent_count();
  if (n > kBruteForceAgentCap)
    throw CapacityError("brute_force_optimum: " + std::to_string(n) + " agents exceeds the cap of " +
                        std::to_string(kBruteForceAgentCap));
  JointAssignment x(n, Phase::WEStraight);
  JointAssignment best = x;
  double best_cost = std::numeric_limits<double>::infinity();
  while (true) {
    const double c = global_cost(cg, x);
    if (c < best_cost) {
      best_cost = c;
      best = x;
    }
    std::size_t k = n;
    while (k > 0) {
      --k;
      const std::size_t v = phase_index(x[k]) + 1;
      if (v < kPhaseCount) {
        x[k] = phase_from_index(v);
        break;
      }
      x[k] = Phase::WEStraight;
      if (k == 0) return {best, n == 0 ? 0.0 : best_cost};
    }
    if (n == 0) return {best, 0.0};
  }
}

// CSV of every edge table entry: edge,x_i,x_j,cost.
inline void write_edge_costs_csv(const CoordinationGraph& cg, std::ostream& out) {
  out << "edge,x_i,x_j,cost\n";
  for (std::size_t e = 0; e < cg.edge_count(); ++e) {
    const CgEdge& ed = cg.edge(e);
    for (Phase xa : kAllPhases)
      for (Phase xb : kAllPhases)
        out << ed.a << '-' << ed.b << ',' << to_string(xa) << ',' << to_string(xb) << ',' << ed.at(xa, xb) << '\n';
  }
}

}  // namespace sigcoord
