#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "sigcoord/baselines.hpp"
#include "sigcoord/loc_iai.hpp"

namespace sigcoord {

enum class ControllerKind : std::uint8_t { FixedTime, MaxPressure, NLCoor, EMC };

inline constexpr std::array<ControllerKind, 4> kAllControllers = {ControllerKind::FixedTime, ControllerKind::MaxPressure,
                                                                  ControllerKind::NLCoor, ControllerKind::EMC};

inline std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::FixedTime: return "fixedtime";
    case ControllerKind::MaxPressure: return "maxpressure";
    case ControllerKind::NLCoor: return "nlcoor";
    case ControllerKind::EMC: return "emc";
  }
  return "?";
}

inline std::optional<ControllerKind> parse_controller(std::string_view s) {
  for (ControllerKind k : kAllControllers)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Communication delay per message ~ N(mu, sigma^2), clamped at zero.
// With nodes > 0 agents are split into that many contiguous hosts and only
// messages crossing hosts are charged.
struct DelayModel {
  double mu_ms = 0.0;
  double sigma_ms = 3.0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
};

// Virtual-clock cost of `passes` message-passing passes over `order`: each
// synchronous round costs the slowest of its messages.
inline double simulate_comm_delay(const CoordinationGraph& cg, const DagOrder& order, std::size_t passes,
                                  const DelayModel& model) {
  if (!(model.mu_ms >= 0.0)) throw std::invalid_argument("delay mean must be >= 0");
  auto rng = detail::substream(model.seed, detail::kDelayStream);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = cg.agent_count();
  auto host = [&](std::size_t agent) { return model.nodes == 0 ? agent : agent * model.nodes / n; };
  double total = 0.0;
  for (std::size_t r = 0; r < passes * order.depth; ++r) {
    double slowest = 0.0;
    for (const CgEdge& e : cg.edges()) {
      const double z = noise(rng);  // drawn for every message so the stream does not depend on mu
      if (model.nodes != 0 && host(e.a) == host(e.b)) continue;
      slowest = std::max(slowest, std::max(0.0, model.mu_ms + model.sigma_ms * z));
    }
    total += slowest;
  }
  return total;
}

struct Decision {
  JointAssignment assignment;
  std::size_t passes = 0;  // coordination passes, for the delay model
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual Decision decide(const QueueState& state, const TurningModel& turning) = 0;
  // Wall-clock budget per decision in ms, if the controller has one.
  virtual std::optional<double> budget_ms() const { return std::nullopt; }
  // Topology and orientation used for delay accounting, if any.
  virtual const CoordinationGraph* topology() const { return nullptr; }
  virtual const DagOrder* order() const { return nullptr; }
};

class FixedTimeController final : public Controller {
 public:
  FixedTimeController(const RoadNetwork& net, FixedTimeConfig cfg) : net_(&net), cfg_(std::move(cfg)) {}
  Decision decide(const QueueState& state, const TurningModel&) override {
    return {fixed_time(state.period, cfg_, net_->intersection_count()), 0};
  }

 private:
  const RoadNetwork* net_;
  FixedTimeConfig cfg_;
};

class MaxPressureController final : public Controller {
 public:
  explicit MaxPressureController(const RoadNetwork& net) : net_(&net) {}
  Decision decide(const QueueState& state, const TurningModel& turning) override {
    return {max_pressure(state, *net_, turning), 0};
  }

 private:
  const RoadNetwork* net_;
};

// NL-Coor alone (local_improvement = false) or full EMC. The DAG depends
// only on topology and is built once.
class CoordinatingController final : public Controller {
 public:
  CoordinatingController(const RoadNetwork& net, EmcConfig cfg, bool local_improvement)
      : net_(&net), cfg_(cfg), local_(local_improvement) {
    const QueueState zero = QueueState::zeros(net);
    topology_ = build_cg(zero, net, TurningModel::uniform(net));
    order_ = min_diameter_dag(topology_);
  }

  Decision decide(const QueueState& state, const TurningModel& turning) override {
    if (local_) {
      auto r = emc_decide(state, *net_, turning, cfg_, &order_);
      return {std::move(r.assignment), r.coordination.passes};
    }
    const CoordinationGraph cg = build_cg(state, *net_, turning);
    auto r = nl_coor(cg, order_, cfg_.budget);
    return {std::move(r.assignment), r.passes};
  }

  std::optional<double> budget_ms() const override {
    if (cfg_.budget.kind == CoorBudget::Kind::WallClock) return cfg_.budget.ms;
    return std::nullopt;
  }
  const CoordinationGraph* topology() const override { return &topology_; }
  const DagOrder* order() const override { return &order_; }

 private:
  const RoadNetwork* net_;
  EmcConfig cfg_;
  bool local_;
  CoordinationGraph topology_;
  DagOrder order_;
};

struct Scenario {
  RoadNetwork network;
  std::vector<Vehicle> flow;
  SimConfig sim;
  ControllerKind controller = ControllerKind::EMC;
  EmcConfig emc;
  FixedTimeConfig fixed_time;
  std::optional<DelayModel> delay;
};

inline std::unique_ptr<Controller> make_controller(const Scenario& s) {
  switch (s.controller) {
    case ControllerKind::FixedTime: return std::make_unique<FixedTimeController>(s.network, s.fixed_time);
    case ControllerKind::MaxPressure: return std::make_unique<MaxPressureController>(s.network);
    case ControllerKind::NLCoor: return std::make_unique<CoordinatingController>(s.network, s.emc, false);
    case ControllerKind::EMC: return std::make_unique<CoordinatingController>(s.network, s.emc, true);
  }
  throw std::invalid_argument("unknown controller");
}

struct Metrics {
  std::optional<double> avg_travel_time_s;  // empty for a run without vehicles
  std::size_t throughput = 0;
  std::size_t in_network = 0;
  double mean_balance = 0.0;
  double max_total_queue = 0.0;
  double mean_decision_ms = 0.0;
  double mean_comm_delay_ms = 0.0;
  std::vector<PeriodRecord> series;
};

inline constexpr double kBudgetOverrunFactor = 10.0;

namespace detail {

// Static turning shares and per-period entry arrivals implied by a routed
// flow, for macro-mode runs.
struct FlowProfile {
  TurningModel turning;
  std::vector<std::vector<double>> arrivals;  // [period][link]
};

inline FlowProfile flow_profile(const RoadNetwork& net, const std::vector<Vehicle>& flow, const SimConfig& cfg) {
  FlowProfile p{TurningModel::uniform(net), std::vector<std::vector<double>>(cfg.horizon, std::vector<double>(net.link_count(), 0.0))};
  p.turning.set_lags(net, cfg.tau_s);
  std::vector<double> counts(net.movement_count(), 0.0), totals(net.link_count(), 0.0);
  for (const Vehicle& v : flow) {
    for (std::size_t k = 0; k + 1 < v.route.size(); ++k) {
      const auto m = net.find_movement(v.route[k], v.route[k + 1]).value();
      counts[m] += 1.0;
      totals[v.route[k].index()] += 1.0;
    }
    const auto t = static_cast<std::size_t>(std::floor(v.depart_s / cfg.tau_s));
    if (t < cfg.horizon) p.arrivals[t][v.origin.index()] += 1.0;
  }
  for (MovementIndex m = 0; m < net.movement_count(); ++m) {
    const double tot = totals[net.movement(m).from.index()];
    if (tot > 0.0) p.turning.r[m] = counts[m] / tot;
  }
  return p;
}

}  // namespace detail

// Runs the controller loop for sim.horizon periods and summarises the run.
// Everything except the wall-clock fields is a deterministic function of the
// scenario.
inline Metrics run_experiment(const Scenario& scenario) {
  const RoadNetwork& net = scenario.network;
  const SimConfig& cfg = scenario.sim;
  if (!(cfg.tau_s > 0.0) || cfg.horizon < 1) throw std::invalid_argument("scenario needs tau > 0 and horizon >= 1");
  auto controller = make_controller(scenario);
  using Clock = std::chrono::steady_clock;

  Metrics out;
  out.series.reserve(cfg.horizon);
  double decision_total = 0.0, delay_total = 0.0;

  auto decide = [&](const QueueState& state, const TurningModel& turning, PeriodRecord& rec) {
    const auto t0 = Clock::now();
    Decision d = controller->decide(state.observed(), turning);
    rec.decision_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (auto b = controller->budget_ms(); b && rec.decision_ms > kBudgetOverrunFactor * *b)
      throw BudgetError("controller took " + std::to_string(rec.decision_ms) + " ms against a budget of " +
                        std::to_string(*b) + " ms");
    if (scenario.delay && controller->order()) {
      DelayModel m = *scenario.delay;
      m.seed = scenario.delay->seed ^ (0x9e3779b97f4a7c15ULL * (state.period + 1));
      rec.comm_delay_ms = simulate_comm_delay(*controller->topology(), *controller->order(), d.passes, m);
    }
    decision_total += rec.decision_ms;
    delay_total += rec.comm_delay_ms;
    return std::move(d.assignment);
  };

  if (cfg.mode == SimMode::Micro) {
    MicroSimulator sim(net, cfg, scenario.flow);
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      PeriodRecord rec;
      const QueueState state = sim.state();
      sim.step(decide(state, sim.estimate_turning(), rec));
      const QueueState after = sim.state();
      rec.period = after.period;
      rec.total_queue = after.total();
      rec.balance = balance_index(after);
      out.series.push_back(rec);
    }
    const double end = static_cast<double>(cfg.horizon) * cfg.tau_s;
    try {
      const TravelMetrics tm = travel_time_metrics(sim.vehicles(), end, out.series);
      out.avg_travel_time_s = tm.avg_travel_time_s;
      out.throughput = tm.throughput;
      out.in_network = tm.in_network;
    } catch (const UndefinedMetricError&) {
      out.avg_travel_time_s.reset();
    }
  } else {
    // Macro runs carry no vehicle identities; average time in the network
    // is estimated from accumulated queue occupancy (Little's law).
    const auto profile = detail::flow_profile(net, scenario.flow, cfg);
    QueueState state = QueueState::zeros(net);
    double occupancy = 0.0, arrived = 0.0;
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      PeriodRecord rec;
      TurningModel turning = profile.turning;
      turning.d = profile.arrivals[t];
      const auto x = decide(state, turning, rec);
      state = macro_step(state, x, net, turning);
      for (double a : turning.d) arrived += a;
      rec.period = state.period;
      rec.total_queue = state.total();
      rec.balance = balance_index(state);
      occupancy += (rec.total_queue + state.in_transit()) * cfg.tau_s;
      out.series.push_back(rec);
    }
    if (arrived > 0.0) out.avg_travel_time_s = occupancy / arrived;
  }

  for (const auto& r : out.series) {
    out.mean_balance += r.balance;
    out.max_total_queue = std::max(out.max_total_queue, r.total_queue);
  }
  const auto periods = static_cast<double>(out.series.size());
  out.mean_balance /= periods;
  out.mean_decision_ms = decision_total / periods;
  out.mean_comm_delay_ms = delay_total / periods;
  return out;
}

struct ComparisonRow {
  ControllerKind controller;
  Metrics metrics;
};

inline std::vector<ComparisonRow> compare_controllers(Scenario scenario,
                                                      std::span<const ControllerKind> kinds = kAllControllers) {
  std::vector<ComparisonRow> rows;
  for (ControllerKind k : kinds) {
    scenario.controller = k;
    rows.push_back({k, run_experiment(scenario)});
  }
  return rows;
}

inline void write_metrics_csv(const Metrics& m, std::ostream& out) {
  out << "period,total_queue,balance,decision_ms,comm_delay_ms\n";
  for (const auto& r : m.series)
    out << r.period << ',' << r.total_queue << ',' << r.balance << ',' << r.decision_ms << ',' << r.comm_delay_ms << '\n';
}

inline void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << "controller,avg_travel_time_s,mean_balance,mean_decision_ms\n";
  for (const auto& r : rows) {
    out << to_string(r.controller) << ',';
    if (r.metrics.avg_travel_time_s) out << *r.metrics.avg_travel_time_s;
    out << ',' << r.metrics.mean_balance << ',' << r.metrics.mean_decision_ms << '\n';
  }
}

}  // namespace sigcoord
