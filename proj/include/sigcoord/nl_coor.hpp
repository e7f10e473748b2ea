#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "sigcoord/dag_order.hpp"

namespace sigcoord {

struct CoorBudget {
  enum class Kind : std::uint8_t { Rounds, WallClock };

  Kind kind = Kind::WallClock;
  std::size_t rounds = 0;
  double ms = 3000.0;

  static CoorBudget Rounds(std::size_t n) { return {Kind::Rounds, n, 0.0}; }
  static CoorBudget WallClock(double ms) { return {Kind::WallClock, 0, ms}; }
};

// Tracks consumption of a CoorBudget. Wall-clock budgets are turned into a
// deadline at construction.
class BudgetMeter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit BudgetMeter(const CoorBudget& b, Clock::time_point start = Clock::now()) : kind_(b.kind), rounds_left_(b.rounds) {
    if (b.kind == CoorBudget::Kind::WallClock)
      deadline_ = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double, std::milli>(b.ms));
  }

  bool exhausted() const {
    if (kind_ == CoorBudget::Kind::Rounds) return rounds_left_ == 0;
    return Clock::now() >= deadline_;
  }

  void charge() {
    if (kind_ == CoorBudget::Kind::Rounds && rounds_left_ > 0) --rounds_left_;
  }

 private:
  CoorBudget::Kind kind_;
  std::size_t rounds_left_ = 0;
  Clock::time_point deadline_{};
};

// Latest message on each directed edge. Slot 2e carries edge.a -> edge.b,
// slot 2e+1 carries edge.b -> edge.a; each is a vector over the receiver's
// phases.
struct MessageTable {
  std::vector<PhaseCosts> values;
  std::vector<char> present;
  std::size_t iterations = 0;

  MessageTable() = default;
  explicit MessageTable(const CoordinationGraph& cg)
      : values(2 * cg.edge_count(), PhaseCosts{}), present(2 * cg.edge_count(), 0) {}

  static std::size_t slot(const CoordinationGraph& cg, std::size_t e, std::size_t sender) {
    return 2 * e + (cg.edge(e).a == sender ? 0 : 1);
  }

  const PhaseCosts* find(const CoordinationGraph& cg, std::size_t e, std::size_t sender) const {
    const std::size_t s = slot(cg, e, sender);
    return present[s] ? &values[s] : nullptr;
  }

  bool empty() const {
    for (char p : present)
      if (p) return false;
    return true;
  }
};

// Largest absolute difference between two tables over slots present in
// either; a slot present in only one counts as infinitely different.
inline double max_difference(const MessageTable& a, const MessageTable& b) {
  double d = 0.0;
  for (std::size_t s = 0; s < a.values.size(); ++s) {
    if (a.present[s] != b.present[s]) return std::numeric_limits<double>::infinity();
    if (!a.present[s]) continue;
    for (std::size_t k = 0; k < kPhaseCount; ++k) d = std::max(d, std::abs(a.values[s][k] - b.values[s][k]));
  }
  return d;
}

// c_i plus every message currently held for agent i, optionally leaving out
// the one sent by `excluded`.
inline PhaseCosts belief(const CoordinationGraph& cg, std::size_t i, const MessageTable& table,
                         std::optional<std::size_t> excluded = std::nullopt) {
  PhaseCosts b = cg.unary(i);
  for (const Incidence& inc : cg.incident(i)) {
    if (excluded && inc.neighbor == *excluded) continue;
    if (const PhaseCosts* r = table.find(cg, inc.edge, inc.neighbor))
      for (std::size_t k = 0; k < kPhaseCount; ++k) b[k] += (*r)[k];
  }
  return b;
}

// R_ij(x_j) = min over x_i of c_i(x_i) + c_ij(x_i,x_j) + incoming R_ki(x_i),
// summing the latest message from every neighbour k other than j. Missing
// messages count as zero, so on a fresh table only the agents ordered
// before i contribute.
inline PhaseCosts compute_message(std::size_t i, std::size_t j, const CoordinationGraph& cg, const MessageTable& incoming) {
  const auto e = cg.find_edge(i, j);
  if (!e) throw std::invalid_argument("compute_message: agents are not adjacent");
  const PhaseCosts b = belief(cg, i, incoming, j);
  PhaseCosts out;
  for (Phase xj : kAllPhases) {
    double best = std::numeric_limits<double>::infinity();
    for (Phase xi : kAllPhases) best = std::min(best, b[phase_index(xi)] + cg.pair_cost(*e, i, xi, xj));
    out[phase_index(xj)] = best;
  }
  return out;
}

// Value-propagation message: i has committed to x_i, so the message is just
// c_ij(x_i, .) shifted to a zero minimum.
inline PhaseCosts value_message(std::size_t i, std::size_t j, Phase xi, const CoordinationGraph& cg) {
  const auto e = cg.find_edge(i, j);
  if (!e) throw std::invalid_argument("value_message: agents are not adjacent");
  PhaseCosts out;
  for (Phase xj : kAllPhases) out[phase_index(xj)] = cg.pair_cost(*e, i, xi, xj);
  const double lo = *std::min_element(out.begin(), out.end());
  for (double& v : out) v -= lo;
  return out;
}

// argmin of c_i plus received messages. Ties keep the incumbent when it is
// among the minima, otherwise the lowest phase index wins.
inline Phase decide(std::size_t i, const CoordinationGraph& cg, const MessageTable& incoming,
                    std::optional<Phase> incumbent = std::nullopt) {
  const PhaseCosts b = belief(cg, i, incoming);
  std::size_t best = 0;
  for (std::size_t k = 1; k < kPhaseCount; ++k)
    if (b[k] < b[best]) best = k;
  if (incumbent && b[phase_index(*incumbent)] <= b[best]) return *incumbent;
  return phase_from_index(best);
}

enum class MessageMode : std::uint8_t { MinSum, ValuePropagation };

// One synchronous round along `order`: every agent recomputes the messages
// to the agents it points at, reading only the previous round's table.
// `values` supplies each agent's incumbent for value propagation.
inline void message_round(const CoordinationGraph& cg, const DagOrder& order, MessageTable& table, MessageMode mode,
                          const JointAssignment* incumbents = nullptr) {
  const MessageTable previous = table;
  for (std::size_t i = 0; i < cg.agent_count(); ++i) {
    std::optional<Phase> xi;
    for (const Incidence& inc : cg.incident(i)) {
      if (!order.points_from(cg, inc.edge, i)) continue;
      const std::size_t s = MessageTable::slot(cg, inc.edge, i);
      if (mode == MessageMode::MinSum) {
        table.values[s] = compute_message(i, inc.neighbor, cg, previous);
      } else {
        if (!xi) xi = decide(i, cg, previous, incumbents ? std::optional((*incumbents)[i]) : std::nullopt);
        table.values[s] = value_message(i, inc.neighbor, *xi, cg);
      }
      table.present[s] = 1;
    }
  }
  ++table.iterations;
}

// `rounds` min-sum rounds along `order` starting from `table`.
inline void message_passing(const CoordinationGraph& cg, const DagOrder& order, std::size_t rounds, MessageTable& table) {
  for (std::size_t r = 0; r < rounds; ++r) message_round(cg, order, table, MessageMode::MinSum);
}

inline MessageTable message_passing(const CoordinationGraph& cg, const DagOrder& order, std::size_t rounds) {
  MessageTable table(cg);
  message_passing(cg, order, rounds, table);
  return table;
}

inline MessageTable message_passing(const CoordinationGraph& cg, const DagOrder& order) {
  return message_passing(cg, order, order.depth);
}

inline JointAssignment decide_all(const CoordinationGraph& cg, const MessageTable& table,
                                  const JointAssignment* incumbents = nullptr) {
  JointAssignment x(cg.agent_count());
  for (std::size_t i = 0; i < cg.agent_count(); ++i)
    x[i] = decide(i, cg, table, incumbents ? std::optional((*incumbents)[i]) : std::nullopt);
  return x;
}

// Per-round message dump and per-pass snapshot costs.
struct NlCoorTrace {
  struct MessageRow {
    std::size_t pass, round, from, to;
    PhaseCosts value;
  };
  struct SnapshotRow {
    std::size_t pass;
    double cost;
  };
  std::vector<MessageRow> messages;
  std::vector<SnapshotRow> snapshots;

  void write_messages_csv(std::ostream& out) const {
    out << "pass,round,from,to,r0,r1,r2,r3\n";
    for (const auto& m : messages)
      out << m.pass << ',' << m.round << ',' << m.from << ',' << m.to << ',' << m.value[0] << ',' << m.value[1] << ','
          << m.value[2] << ',' << m.value[3] << '\n';
  }
  void write_snapshots_csv(std::ostream& out) const {
    out << "pass,cost\n";
    for (const auto& s : snapshots) out << s.pass << ',' << s.cost << '\n';
  }
};

struct NlCoorResult {
  JointAssignment assignment;
  std::size_t passes = 0;  // completed directional passes
  std::size_t rounds = 0;  // message rounds executed
  bool converged = false;
  bool interrupted = false;
};

// Anytime network-level coordination. Alternates passes of order.depth
// synchronous rounds along `order` and its reverse, snapshotting a joint
// decision after each pass. The first pass is plain min-sum; later passes
// use value propagation so that every agent extends the decisions already
// taken upstream, which makes the result exact on trees after one forward
// and one reverse pass. Stops when the budget runs out or when two
// consecutive value-propagation passes leave the decision unchanged, after
// which further passes cannot change anything.
inline NlCoorResult nl_coor(const CoordinationGraph& cg, const DagOrder& order, BudgetMeter& meter,
                            NlCoorTrace* trace = nullptr) {
  NlCoorResult res;
  MessageTable table(cg);
  if (order.depth == 0 || meter.exhausted()) {
    res.assignment = decide_all(cg, table);
    res.converged = order.depth == 0;
    res.interrupted = !res.converged;
    return res;
  }
  std::optional<JointAssignment> snapshot;
  DagOrder dir = order;
  while (true) {
    const MessageMode mode = res.passes == 0 ? MessageMode::MinSum : MessageMode::ValuePropagation;
    for (std::size_t r = 0; r < dir.depth; ++r) {
      if (meter.exhausted()) {
        res.assignment = snapshot ? *snapshot : decide_all(cg, table);
        res.interrupted = true;
        return res;
      }
      message_round(cg, dir, table, mode, snapshot ? &*snapshot : nullptr);
      meter.charge();
      ++res.rounds;
      if (trace)
        for (std::size_t e = 0; e < cg.edge_count(); ++e) {
          const CgEdge& ed = cg.edge(e);
          const bool ab = dir.a_to_b[e];
          const std::size_t from = ab ? ed.a : ed.b, to = ab ? ed.b : ed.a;
          trace->messages.push_back({res.passes, r, from, to, table.values[MessageTable::slot(cg, e, from)]});
        }
    }
    ++res.passes;
    JointAssignment next = decide_all(cg, table, mode == MessageMode::ValuePropagation ? &*snapshot : nullptr);
    if (trace) trace->snapshots.push_back({res.passes, global_cost(cg, next)});
    if (res.passes >= 3 && next == *snapshot) {
      res.assignment = std::move(next);
      res.converged = true;
      return res;
    }
    snapshot = std::move(next);
    dir = reverse(dir);
  }
}

inline NlCoorResult nl_coor(const CoordinationGraph& cg, const DagOrder& order, const CoorBudget& budget,
                            NlCoorTrace* trace = nullptr) {
  BudgetMeter meter(budget);
  return nl_coor(cg, order, meter, trace);
}

}  // namespace sigcoord
