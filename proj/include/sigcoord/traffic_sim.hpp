#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sigcoord/road_network.hpp"

namespace sigcoord {

struct Vehicle {
  std::uint64_t id = 0;
  LinkId origin;
  double depart_s = 0.0;
  LinkId destination;
  std::vector<LinkId> route;  // origin ... destination
  std::optional<double> enter_s;
  std::optional<double> exit_s;

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

// Queue lengths q(l,h) at the start of a period, indexed by movement.
// transit[k][m] counts vehicles already travelling along a link that will
// join queue m after k+1 more periods; empty when nothing is in transit.
struct QueueState {
  std::size_t period = 0;
  std::vector<double> q;
  std::vector<std::vector<double>> transit;

  static QueueState zeros(const RoadNetwork& net) { return {0, std::vector<double>(net.movement_count(), 0.0), {}}; }

  // Vehicles joining queue m at the next period boundary whatever the
  // signals do.
  double arriving(MovementIndex m) const { return transit.empty() ? 0.0 : transit.front()[m]; }

  // What a controller observes: stop-line queues only. Vehicles still
  // driving along a link are invisible until they queue.
  QueueState observed() const { return {period, q, {}}; }

  double in_transit() const {
    double n = 0.0;
    for (const auto& row : transit) n += std::accumulate(row.begin(), row.end(), 0.0);
    return n;
  }

  double& at(const RoadNetwork& net, LinkId from, LinkId to) { return q.at(net.find_movement(from, to).value()); }
  double at(const RoadNetwork& net, LinkId from, LinkId to) const { return q.at(net.find_movement(from, to).value()); }

  double total() const { return std::accumulate(q.begin(), q.end(), 0.0); }
};

enum class SimMode : std::uint8_t { Micro, Macro };

struct SimConfig {
  double tau_s = 10.0;
  std::size_t horizon = 360;
  std::uint64_t seed = 0;
  SimMode mode = SimMode::Micro;
};

// Periods a vehicle released onto l needs before it joins one of l's
// queues: ceil(length / (speed * tau)), at least 1.
inline std::size_t link_lag(const RoadNetwork& net, LinkId l, double tau_s) {
  const Link& k = net.link(l);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k.length_m / (k.speed_mps * tau_s) - 1e-9)));
}

// Turning proportions r(l,h), indexed by movement, and expected exogenous
// arrivals d(l) per period, indexed by link (zero except on entry links).
// lag(l) is the traversal time of l in periods; an empty vector means every
// link is crossed within one period.
struct TurningModel {
  std::vector<double> r;
  std::vector<double> d;
  std::vector<std::size_t> lag;

  static TurningModel uniform(const RoadNetwork& net) {
    TurningModel t{std::vector<double>(net.movement_count(), 0.0), std::vector<double>(net.link_count(), 0.0), {}};
    for (std::size_t l = 0; l < net.link_count(); ++l) {
      const auto& ms = net.movements_from(LinkId{l});
      for (MovementIndex m : ms) t.r[m] = 1.0 / static_cast<double>(ms.size());
    }
    return t;
  }

  std::size_t lag_of(LinkId l) const { return lag.empty() ? 1 : lag[l.index()]; }

  // Whether vehicles released onto l this period already queue on it next
  // period.
  bool reaches_next_period(LinkId l) const { return lag_of(l) <= 1; }

  void set_lags(const RoadNetwork& net, double tau_s) {
    lag.resize(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l) lag[l] = link_lag(net, LinkId{l}, tau_s);
  }
};

namespace detail {

inline void check_inputs(const QueueState& state, const JointAssignment& decision, const RoadNetwork& net) {
  if (decision.size() != net.intersection_count())
    throw std::invalid_argument("decision covers " + std::to_string(decision.size()) + " intersections, network has " +
                                std::to_string(net.intersection_count()));
  if (state.q.size() != net.movement_count()) throw std::invalid_argument("queue state does not match the network");
  for (const auto& row : state.transit)
    if (row.size() != net.movement_count()) throw std::invalid_argument("transit state does not match the network");
}

inline void check_turning(const TurningModel& turning, const RoadNetwork& net) {
  if (turning.r.size() != net.movement_count() || turning.d.size() != net.link_count() ||
      (!turning.lag.empty() && turning.lag.size() != net.link_count()))
    throw std::invalid_argument("turning model does not match the network");
}

}  // namespace detail

// Vehicles a movement discharges this period: f(l,h)x(l,h) ∧ q(l,h).
inline double released(const RoadNetwork& net, MovementIndex m, Phase phase, double queue) {
  const Movement& mv = net.movement(m);
  return mv.served_by(phase) ? std::min(mv.sat_flow, queue) : 0.0;
}

// One-period expected lookahead Q(t+1): each queue loses its release and
// gains the vehicles that reach it by the next period boundary. Those are
// the exogenous arrivals on entry links, the upstream releases on internal
// links crossed within one period (split by r), and vehicles already in
// transit. The transit pipeline itself is not advanced.
inline QueueState predict_next_queues(const QueueState& state, const JointAssignment& decision, const RoadNetwork& net,
                                      const TurningModel& turning) {
  detail::check_inputs(state, decision, net);
  detail::check_turning(turning, net);
  QueueState next{state.period + 1, state.q, {}};
  std::vector<double> out(net.movement_count(), 0.0);
  for (MovementIndex m = 0; m < net.movement_count(); ++m) {
    const Movement& mv = net.movement(m);
    out[m] = released(net, m, decision[mv.intersection.index()], state.q[m]);
    next.q[m] += state.arriving(m) - out[m];
  }
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    const LinkId link{l};
    double inflow = 0.0;
    switch (net.link(link).kind) {
      case LinkKind::Entry: inflow = turning.d[l]; break;
      case LinkKind::Internal:
        if (!turning.reaches_next_period(link)) continue;
        for (MovementIndex m : net.movements_into(link)) inflow += out[m];
        break;
      case LinkKind::Exit: continue;
    }
    if (inflow == 0.0) continue;
    for (MovementIndex m : net.movements_from(link)) next.q[m] += inflow * turning.r[m];
  }
  return next;
}

// Macro-mode period update. Pushes each movement's discharge forward
// to the downstream queues rather than pulling per link as the predictor
// does; the two must agree.
// Flow released onto a link with lag L > 1 waits in the transit pipeline
// for L periods, so with unit lags this is exactly the one-period update.
inline QueueState macro_step(const QueueState& state, const JointAssignment& decision, const RoadNetwork& net,
                             const TurningModel& turning) {
  detail::check_inputs(state, decision, net);
  detail::check_turning(turning, net);
  QueueState next{state.period + 1, state.q, {}};
  if (!state.transit.empty()) {
    for (MovementIndex m = 0; m < net.movement_count(); ++m) next.q[m] += state.transit.front()[m];
    next.transit.assign(state.transit.begin() + 1, state.transit.end());
  }
  for (MovementIndex m = 0; m < net.movement_count(); ++m) {
    const Movement& mv = net.movement(m);
    if (!mv.served_by(decision[mv.intersection.index()])) continue;
    const double moved = std::min(mv.sat_flow, state.q[m]);
    next.q[m] -= moved;
    if (net.link(mv.to).kind == LinkKind::Exit || moved == 0.0) continue;
    const std::size_t lag = turning.lag_of(mv.to);
    std::vector<double>* target = &next.q;
    if (lag > 1) {
      if (next.transit.size() < lag - 1) next.transit.resize(lag - 1, std::vector<double>(net.movement_count(), 0.0));
      target = &next.transit[lag - 2];
    }
    for (MovementIndex down : net.movements_from(mv.to)) (*target)[down] += moved * turning.r[down];
  }
  while (!next.transit.empty() && std::all_of(next.transit.back().begin(), next.transit.back().end(), [](double v) { return v == 0.0; }))
    next.transit.pop_back();
  for (LinkId e : net.entry_links())
    for (MovementIndex m : net.movements_from(e)) next.q[m] += turning.d[e.index()] * turning.r[m];
  for (double& v : next.q) v = std::max(v, 0.0);
  return next;
}

// Balance index: sum of squared queue lengths, network-wide or at one
// intersection.
inline double balance_index(const QueueState& state) {
  double b = 0.0;
  for (double v : state.q) b += v * v;
  return b;
}

inline double balance_index(const QueueState& state, const RoadNetwork& net, IntersectionId i) {
  double b = 0.0;
  for (MovementIndex m : net.movements_at(i)) b += state.q[m] * state.q[m];
  return b;
}

// --- Flow generation ------------------------------------------------------

namespace detail {

// Named sub-stream of a scenario seed.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

inline constexpr std::uint64_t kFlowStream = 1;
inline constexpr std::uint64_t kRouteStream = 2;
inline constexpr std::uint64_t kDelayStream = 3;

}  // namespace detail

// Hop-count shortest routes with random tie-breaking. Distances to each
// destination are computed once and cached.
class Router {
 public:
  explicit Router(const RoadNetwork& net) : net_(&net) {}

  bool reachable(LinkId from, LinkId to) { return distances(to)[from.index()] != kUnreachable; }

  template <class Rng>
  std::vector<LinkId> route(LinkId from, LinkId to, Rng& rng) {
    const auto& dist = distances(to);
    if (dist[from.index()] == kUnreachable)
      throw std::invalid_argument("no route from link '" + net_->link(from).name + "' to '" + net_->link(to).name + "'");
    std::vector<LinkId> path{from};
    std::vector<LinkId> next;
    LinkId at = from;
    while (at != to) {
      next.clear();
      for (LinkId h : net_->downstream(at))
        if (dist[h.index()] + 1 == dist[at.index()]) next.push_back(h);
      std::sort(next.begin(), next.end());
      at = next.size() == 1 ? next.front() : next[std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng)];
      path.push_back(at);
    }
    return path;
  }

 private:
  static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

  const std::vector<std::uint32_t>& distances(LinkId to) {
    auto [it, fresh] = cache_.try_emplace(to.value);
    if (!fresh) return it->second;
    auto& dist = it->second;
    dist.assign(net_->link_count(), kUnreachable);
    std::deque<LinkId> bfs{to};
    dist[to.index()] = 0;
    while (!bfs.empty()) {
      LinkId h = bfs.front();
      bfs.pop_front();
      for (LinkId l : net_->upstream(h))
        if (dist[l.index()] == kUnreachable) {
          dist[l.index()] = dist[h.index()] + 1;
          bfs.push_back(l);
        }
    }
    return dist;
  }

  const RoadNetwork* net_;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> cache_;
};

// floor(rate * duration) vehicles, evenly spaced in time. Origins cycle
// through a shuffled list of entry links; destinations are uniform over the
// exit links reachable from the origin.
inline std::vector<Vehicle> generate_uniform_flow(const RoadNetwork& net, double rate_vps, double duration_s,
                                                  std::uint64_t seed) {
  if (!(rate_vps > 0.0)) throw std::invalid_argument("flow rate must be positive");
  if (!(duration_s > 0.0)) throw std::invalid_argument("flow duration must be positive");
  if (net.entry_links().empty() || net.exit_links().empty())
    throw std::invalid_argument("network has no entry or exit links");

  auto rng = detail::substream(seed, detail::kFlowStream);
  auto route_rng = detail::substream(seed, detail::kRouteStream);
  std::vector<LinkId> origins = net.entry_links();
  std::shuffle(origins.begin(), origins.end(), rng);

  Router router(net);
  std::unordered_map<std::uint32_t, std::vector<LinkId>> targets;
  for (LinkId o : origins) {
    auto& t = targets[o.value];
    for (LinkId x : net.exit_links())
      if (router.reachable(o, x)) t.push_back(x);
  }

  const auto count = static_cast<std::size_t>(std::floor(rate_vps * duration_s + 1e-9));
  std::vector<Vehicle> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vehicle v;
    v.id = k;
    v.origin = origins[k % origins.size()];
    const auto& t = targets[v.origin.value];
    if (t.empty()) throw std::invalid_argument("entry link '" + net.link(v.origin).name + "' reaches no exit link");
    v.destination = t[std::uniform_int_distribution<std::size_t>(0, t.size() - 1)(rng)];
    v.depart_s = duration_s * static_cast<double>(k) / static_cast<double>(count);
    v.route = router.route(v.origin, v.destination, route_rng);
    out.push_back(std::move(v));
  }
  return out;
}

// Computes routes for vehicles given only (origin, depart, destination).
inline void assign_routes(const RoadNetwork& net, std::vector<Vehicle>& vehicles, std::uint64_t seed) {
  Router router(net);
  auto rng = detail::substream(seed, detail::kRouteStream);
  for (Vehicle& v : vehicles) {
    if (net.link(v.origin).kind != LinkKind::Entry)
      throw std::invalid_argument("vehicle " + std::to_string(v.id) + ": origin is not an entry link");
    if (net.link(v.destination).kind != LinkKind::Exit)
      throw std::invalid_argument("vehicle " + std::to_string(v.id) + ": destination is not an exit link");
    v.route = router.route(v.origin, v.destination, rng);
  }
}

// --- Micro simulation -----------------------------------------------------

// Vehicle-level simulation. Queues are FIFO per movement; a vehicle released
// onto an internal link joins its next queue after ceil(length/(speed*tau))
// periods.
class MicroSimulator {
 public:
  MicroSimulator(const RoadNetwork& net, SimConfig cfg, std::vector<Vehicle> vehicles)
      : net_(&net), cfg_(cfg), vehicles_(std::move(vehicles)), queues_(net.movement_count()), leg_(vehicles_.size(), 0) {
    if (!(cfg_.tau_s > 0.0)) throw std::invalid_argument("tau must be positive");
    if (cfg_.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    for (const Vehicle& v : vehicles_) {
      if (v.route.size() < 2 || v.route.front() != v.origin || v.route.back() != v.destination)
        throw std::invalid_argument("vehicle " + std::to_string(v.id) + ": route must run from origin to destination");
      for (std::size_t k = 0; k + 1 < v.route.size(); ++k)
        if (!net.find_movement(v.route[k], v.route[k + 1]))
          throw std::invalid_argument("vehicle " + std::to_string(v.id) + ": route uses a missing movement");
    }
    pending_.resize(vehicles_.size());
    std::iota(pending_.begin(), pending_.end(), std::size_t{0});
    std::stable_sort(pending_.begin(), pending_.end(),
                     [&](std::size_t a, std::size_t b) { return vehicles_[a].depart_s < vehicles_[b].depart_s; });
    delay_.resize(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l) delay_[l] = link_lag(net, LinkId{l}, cfg_.tau_s);
  }

  std::size_t period() const { return period_; }
  const SimConfig& config() const { return cfg_; }
  const RoadNetwork& network() const { return *net_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }

  QueueState state() const {
    QueueState s{period_, std::vector<double>(queues_.size()), {}};
    for (std::size_t m = 0; m < queues_.size(); ++m) s.q[m] = static_cast<double>(queues_[m].size());
    if (!transit_.empty()) {
      s.transit.assign(transit_.rbegin()->first - period_, std::vector<double>(queues_.size(), 0.0));
      for (const auto& [p, vs] : transit_)
        for (std::size_t v : vs) s.transit[p - period_ - 1][next_movement(v)] += 1.0;
    }
    return s;
  }

  const std::deque<std::size_t>& queue(MovementIndex m) const { return queues_.at(m); }

  std::size_t entered() const { return entered_; }
  std::size_t exited() const { return exited_; }
  std::size_t queued() const {
    std::size_t n = 0;
    for (const auto& q : queues_) n += q.size();
    return n;
  }
  std::size_t in_transit() const {
    std::size_t n = 0;
    for (const auto& [p, vs] : transit_) n += vs.size();
    return n;
  }

  // Advances one period under `decision`.
  void step(const JointAssignment& decision) {
    if (decision.size() != net_->intersection_count())
      throw std::invalid_argument("decision covers " + std::to_string(decision.size()) + " intersections, network has " +
                                  std::to_string(net_->intersection_count()));
    const double end_of_period = static_cast<double>(period_ + 1) * cfg_.tau_s;

    for (MovementIndex m = 0; m < queues_.size(); ++m) {
      const Movement& mv = net_->movement(m);
      if (!mv.served_by(decision[mv.intersection.index()])) continue;
      auto& q = queues_[m];
      auto n = std::min(q.size(), static_cast<std::size_t>(std::floor(mv.sat_flow + 1e-9)));
      for (; n > 0; --n) {
        const std::size_t v = q.front();
        q.pop_front();
        const LinkId next = vehicles_[v].route[++leg_[v]];
        if (net_->link(next).kind == LinkKind::Exit) {
          vehicles_[v].exit_s = end_of_period;
          ++exited_;
        } else {
          transit_[period_ + delay_[next.index()]].push_back(v);
        }
      }
    }

    ++period_;
    if (auto it = transit_.find(period_); it != transit_.end()) {
      for (std::size_t v : it->second) join_queue(v);
      transit_.erase(it);
    }
    while (next_pending_ < pending_.size() && vehicles_[pending_[next_pending_]].depart_s < end_of_period) {
      const std::size_t v = pending_[next_pending_++];
      vehicles_[v].enter_s = vehicles_[v].depart_s;
      ++entered_;
      join_queue(v);
    }
  }

  // Turning proportions from the routes of vehicles queued on or heading to
  // each link; entry links also count the vehicles departing this period.
  // d(l) is the number of vehicles that will join entry link l by the next
  // period boundary.
  TurningModel estimate_turning() const {
    TurningModel t{std::vector<double>(net_->movement_count(), 0.0), std::vector<double>(net_->link_count(), 0.0), delay_};
    std::vector<double> total(net_->link_count(), 0.0);
    auto count = [&](std::size_t v, std::size_t leg) {
      const auto& route = vehicles_[v].route;
      if (leg + 1 >= route.size()) return;
      if (auto m = net_->find_movement(route[leg], route[leg + 1])) {
        t.r[*m] += 1.0;
        total[route[leg].index()] += 1.0;
      }
    };
    for (const auto& q : queues_)
      for (std::size_t v : q) count(v, leg_[v]);
    for (const auto& [p, vs] : transit_)
      for (std::size_t v : vs) count(v, leg_[v]);
    const double end_of_period = static_cast<double>(period_ + 1) * cfg_.tau_s;
    for (std::size_t k = next_pending_; k < pending_.size(); ++k) {
      const std::size_t v = pending_[k];
      if (vehicles_[v].depart_s >= end_of_period) break;
      t.d[vehicles_[v].origin.index()] += 1.0;
      count(v, 0);
    }
    for (std::size_t l = 0; l < net_->link_count(); ++l) {
      const auto& ms = net_->movements_from(LinkId{l});
      for (MovementIndex m : ms)
        t.r[m] = total[l] > 0.0 ? t.r[m] / total[l] : 1.0 / static_cast<double>(ms.size());
    }
    return t;
  }

 private:
  MovementIndex next_movement(std::size_t v) const {
    const auto& route = vehicles_[v].route;
    return net_->find_movement(route[leg_[v]], route[leg_[v] + 1]).value();
  }

  void join_queue(std::size_t v) { queues_[next_movement(v)].push_back(v); }

  const RoadNetwork* net_;
  SimConfig cfg_;
  std::vector<Vehicle> vehicles_;
  std::vector<std::deque<std::size_t>> queues_;
  std::vector<std::size_t> leg_;  // index into route of the link a vehicle is on
  std::map<std::size_t, std::vector<std::size_t>> transit_;  // arrival period -> vehicles
  std::vector<std::size_t> pending_;
  std::size_t next_pending_ = 0;
  std::vector<std::size_t> delay_;
  std::size_t period_ = 0;
  std::size_t entered_ = 0;
  std::size_t exited_ = 0;
};

// --- Metrics --------------------------------------------------------------

struct PeriodRecord {
  std::size_t period = 0;
  double total_queue = 0.0;
  double balance = 0.0;
  double decision_ms = 0.0;
  double comm_delay_ms = 0.0;
};

struct TravelMetrics {
  double avg_travel_time_s = 0.0;
  std::size_t throughput = 0;  // vehicles that reached their exit link
  std::size_t in_network = 0;
  double mean_balance = 0.0;
  double max_total_queue = 0.0;
};

// Average of (exit - depart) over every vehicle that departed before
// end_time; vehicles still in the network count (end_time - depart).
inline TravelMetrics travel_time_metrics(std::span<const Vehicle> vehicles, double end_time_s,
                                         std::span<const PeriodRecord> series = {}) {
  TravelMetrics m;
  double sum = 0.0;
  std::size_t n = 0;
  for (const Vehicle& v : vehicles) {
    if (v.depart_s >= end_time_s) continue;
    if (v.exit_s) {
      sum += *v.exit_s - v.depart_s;
      ++m.throughput;
    } else {
      sum += end_time_s - v.depart_s;
      ++m.in_network;
    }
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("average travel time is undefined for zero vehicles");
  m.avg_travel_time_s = sum / static_cast<double>(n);
  if (!series.empty()) {
    double b = 0.0;
    for (const auto& r : series) {
      b += r.balance;
      m.max_total_queue = std::max(m.max_total_queue, r.total_queue);
    }
    m.mean_balance = b / static_cast<double>(series.size());
  }
  return m;
}

// --- Flow JSON --------------------------------------------------------------

struct RateSpec {
  double rate_vps = 0.0;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
};

inline nlohmann::json flow_to_json(const RoadNetwork& net, std::span<const Vehicle> vehicles) {
  auto doc = nlohmann::json::array();
  for (const Vehicle& v : vehicles)
    doc.push_back({{"id", v.id},
                   {"origin", net.link(v.origin).name},
                   {"depart_s", v.depart_s},
                   {"destination", net.link(v.destination).name}});
  return doc;
}

// Accepts either an explicit vehicle array or a {rate_vps, duration_s, seed}
// object. Routes are computed on load.
inline std::vector<Vehicle> flow_from_json(const RoadNetwork& net, const nlohmann::json& doc, std::uint64_t route_seed = 0) {
  if (doc.is_object()) {
    if (!doc.contains("rate_vps") || !doc.contains("duration_s")) throw LoadError("flow rate spec needs rate_vps and duration_s");
    RateSpec spec{doc["rate_vps"].get<double>(), doc["duration_s"].get<double>(), doc.value("seed", std::uint64_t{0})};
    return generate_uniform_flow(net, spec.rate_vps, spec.duration_s, spec.seed);
  }
  if (!doc.is_array()) throw LoadError("flow file must be an array of vehicles or a rate spec object");
  std::vector<Vehicle> out;
  for (const auto& j : doc) {
    if (!j.is_object() || !j.contains("origin") || !j.contains("destination") || !j.contains("depart_s"))
      throw LoadError("flow entry " + std::to_string(out.size()) + ": needs origin, depart_s and destination");
    Vehicle v;
    v.id = j.value("id", static_cast<std::uint64_t>(out.size()));
    const auto o = net.find_link(detail::id_string(j["origin"], "flow entry"));
    const auto d = net.find_link(detail::id_string(j["destination"], "flow entry"));
    if (!o || !d) throw LoadError("flow entry " + std::to_string(v.id) + ": unknown origin or destination link");
    v.origin = *o;
    v.destination = *d;
    v.depart_s = j["depart_s"].get<double>();
    out.push_back(std::move(v));
  }
  try {
    assign_routes(net, out, route_seed);
  } catch (const std::invalid_argument& e) {
    throw LoadError(std::string("flow: ") + e.what());
  }
  return out;
}

inline std::vector<Vehicle> load_flow(const RoadNetwork& net, const std::string& path, std::uint64_t route_seed = 0) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open flow file '" + path + "'");
  try {
    return flow_from_json(net, nlohmann::json::parse(in), route_seed);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("flow '" + path + "': " + e.what());
  }
}

}  // namespace sigcoord
