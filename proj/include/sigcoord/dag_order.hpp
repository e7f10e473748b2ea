#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <vector>

#include "sigcoord/coord_graph.hpp"

namespace sigcoord {

// Orientation of every CG edge toward a single sink agent.
struct DagOrder {
  std::size_t sink = 0;
  std::vector<std::size_t> dist;  // hop distance of each agent to the sink
  std::vector<char> a_to_b;       // per edge: 1 if oriented edge.a -> edge.b
  std::size_t diameter = 0;       // eccentricity of the sink
  std::size_t depth = 0;          // longest directed path; rounds per pass

  // True if the edge points from agent `from` to its other endpoint.
  bool points_from(const CoordinationGraph& cg, std::size_t e, std::size_t from) const {
    return (cg.edge(e).a == from) == static_cast<bool>(a_to_b[e]);
  }

  friend bool operator==(const DagOrder&, const DagOrder&) = default;
};

namespace detail {

inline constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();

inline std::vector<std::size_t> bfs_distances(const CoordinationGraph& cg, std::size_t from) {
  std::vector<std::size_t> dist(cg.agent_count(), kFar);
  std::deque<std::size_t> q{from};
  dist[from] = 0;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop_front();
    for (const Incidence& inc : cg.incident(u))
      if (dist[inc.neighbor] == kFar) {
        dist[inc.neighbor] = dist[u] + 1;
        q.push_back(inc.neighbor);
      }
  }
  return dist;
}

// Topological order of the oriented graph, or empty if it has a cycle.
inline std::vector<std::size_t> topological_order(const CoordinationGraph& cg, const std::vector<char>& a_to_b) {
  const std::size_t n = cg.agent_count();
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t e = 0; e < cg.edge_count(); ++e) ++indeg[a_to_b[e] ? cg.edge(e).b : cg.edge(e).a];
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t u = ready.front();
    ready.pop_front();
    order.push_back(u);
    for (const Incidence& inc : cg.incident(u)) {
      const CgEdge& ed = cg.edge(inc.edge);
      const bool out = (ed.a == u) == static_cast<bool>(a_to_b[inc.edge]);
      if (out && --indeg[inc.neighbor] == 0) ready.push_back(inc.neighbor);
    }
  }
  if (order.size() != n) order.clear();
  return order;
}

inline std::size_t longest_path(const CoordinationGraph& cg, const std::vector<char>& a_to_b) {
  const auto order = topological_order(cg, a_to_b);
  if (order.size() != cg.agent_count()) throw TopologyError("orientation contains a directed cycle");
  std::vector<std::size_t> len(cg.agent_count(), 0);
  std::size_t best = 0;
  for (std::size_t u : order)
    for (const Incidence& inc : cg.incident(u)) {
      const CgEdge& ed = cg.edge(inc.edge);
      if ((ed.a == u) == static_cast<bool>(a_to_b[inc.edge])) {
        len[inc.neighbor] = std::max(len[inc.neighbor], len[u] + 1);
        best = std::max(best, len[inc.neighbor]);
      }
    }
  return best;
}

}  // namespace detail

// Max BFS hop distance from agent a to any other agent.
inline std::size_t eccentricity(const CoordinationGraph& cg, std::size_t a) {
  if (a >= cg.agent_count()) throw std::invalid_argument("eccentricity: unknown agent");
  const auto dist = detail::bfs_distances(cg, a);
  const std::size_t ecc = *std::max_element(dist.begin(), dist.end());
  if (ecc == detail::kFar) throw TopologyError("coordination graph is disconnected");
  return ecc;
}

inline bool is_acyclic(const CoordinationGraph& cg, const DagOrder& o) {
  return detail::topological_order(cg, o.a_to_b).size() == cg.agent_count();
}

// Picks the agent of minimum eccentricity (lowest index on ties) as sink and
// orients each edge from the endpoint farther from the sink to the nearer
// one. Equal-distance edges go from the higher index to the lower.
inline DagOrder min_diameter_dag(const CoordinationGraph& cg) {
  const std::size_t n = cg.agent_count();
  if (n == 0) throw TopologyError("coordination graph has no agents");
  DagOrder o;
  std::size_t best = detail::kFar;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ecc = eccentricity(cg, i);
    if (ecc < best) {
      best = ecc;
      o.sink = i;
    }
  }
  o.diameter = best;
  o.dist = detail::bfs_distances(cg, o.sink);
  o.a_to_b.resize(cg.edge_count());
  for (std::size_t e = 0; e < cg.edge_count(); ++e) {
    const CgEdge& ed = cg.edge(e);
    const std::size_t da = o.dist[ed.a], db = o.dist[ed.b];
    o.a_to_b[e] = da > db || (da == db && ed.a > ed.b);
  }
  o.depth = detail::longest_path(cg, o.a_to_b);
  return o;
}

// Flips every edge. Distances and diameter are kept; depth is unchanged
// because path lengths are symmetric under reversal.
inline DagOrder reverse(DagOrder o) {
  for (char& d : o.a_to_b) d = !d;
  return o;
}

inline void write_dot(const CoordinationGraph& cg, const DagOrder& o, std::ostream& out) {
  out << "digraph dag {\n  " << o.sink << " [shape=doublecircle];\n";
  for (std::size_t e = 0; e < cg.edge_count(); ++e) {
    const CgEdge& ed = cg.edge(e);
    if (o.a_to_b[e]) out << "  " << ed.a << " -> " << ed.b << ";\n";
    else out << "  " << ed.b << " -> " << ed.a << ";\n";
  }
  out << "}\n";
}

}  // namespace sigcoord
