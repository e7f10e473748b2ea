#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sigcoord/types.hpp"

namespace sigcoord {

enum class LinkKind : std::uint8_t { Entry, Internal, Exit };

inline std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::Entry: return "entry";
    case LinkKind::Internal: return "internal";
    case LinkKind::Exit: return "exit";
  }
  return "?";
}

inline constexpr double kDefaultSpeedMps = 10.0;
inline constexpr double kDefaultPhasedFlow = 5.0;
inline constexpr double kDefaultRightTurnFlow = 3.0;

struct Intersection {
  std::string name;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Intersection&, const Intersection&) = default;
};

struct Link {
  std::string name;
  LinkKind kind = LinkKind::Internal;
  std::optional<IntersectionId> start;
  std::optional<IntersectionId> end;
  double length_m = 0.0;
  double speed_mps = kDefaultSpeedMps;

  friend bool operator==(const Link&, const Link&) = default;
};

// Traffic crossing `intersection` from input link `from` to output link `to`.
// Right turns carry no phase and are served every period.
struct Movement {
  LinkId from;
  LinkId to;
  IntersectionId intersection;
  std::optional<Phase> phase;
  double sat_flow = 0.0;  // vehicles per period

  bool served_by(Phase p) const { return !phase || *phase == p; }

  friend bool operator==(const Movement&, const Movement&) = default;
};

using MovementIndex = std::size_t;

// Directed-link road topology with the adjacency tables every other module
// queries. Immutable after construction.
class RoadNetwork {
 public:
  RoadNetwork() = default;

  RoadNetwork(std::vector<Intersection> intersections, std::vector<Link> links, std::vector<Movement> movements)
      : intersections_(std::move(intersections)), links_(std::move(links)), movements_(std::move(movements)) {
    build_caches();
  }

  std::size_t intersection_count() const { return intersections_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t movement_count() const { return movements_.size(); }

  const std::vector<Intersection>& intersections() const { return intersections_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Movement>& movements() const { return movements_; }

  const Intersection& intersection(IntersectionId i) const { return intersections_.at(i.index()); }
  const Link& link(LinkId l) const { return links_.at(l.index()); }
  const Movement& movement(MovementIndex m) const { return movements_.at(m); }

  // I(i) and O(i).
  const std::vector<LinkId>& inputs(IntersectionId i) const { return inputs_[i.index()]; }
  const std::vector<LinkId>& outputs(IntersectionId i) const { return outputs_[i.index()]; }
  // Neg(i), sorted ascending.
  const std::vector<IntersectionId>& neighbors(IntersectionId i) const { return neighbors_[i.index()]; }
  // Up_l and Do_l.
  const std::vector<LinkId>& upstream(LinkId l) const { return upstream_[l.index()]; }
  const std::vector<LinkId>& downstream(LinkId l) const { return downstream_[l.index()]; }

  // Movements (l, *) leaving link l at its end intersection.
  const std::vector<MovementIndex>& movements_from(LinkId l) const { return from_[l.index()]; }
  // Movements (*, l) feeding link l at its start intersection.
  const std::vector<MovementIndex>& movements_into(LinkId l) const { return into_[l.index()]; }
  const std::vector<MovementIndex>& movements_at(IntersectionId i) const { return at_[i.index()]; }

  std::optional<MovementIndex> find_movement(LinkId from, LinkId to) const {
    auto it = by_pair_.find(pair_key(from, to));
    if (it == by_pair_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<IntersectionId>& boundary() const { return boundary_; }
  bool is_boundary(IntersectionId i) const { return is_boundary_[i.index()]; }
  const std::vector<LinkId>& entry_links() const { return entries_; }
  const std::vector<LinkId>& exit_links() const { return exits_; }

  std::optional<LinkId> find_link(std::string_view name) const {
    for (std::size_t l = 0; l < links_.size(); ++l)
      if (links_[l].name == name) return LinkId{l};
    return std::nullopt;
  }
  std::optional<IntersectionId> find_intersection(std::string_view name) const {
    for (std::size_t i = 0; i < intersections_.size(); ++i)
      if (intersections_[i].name == name) return IntersectionId{i};
    return std::nullopt;
  }

  friend bool operator==(const RoadNetwork& a, const RoadNetwork& b) {
    return a.intersections_ == b.intersections_ && a.links_ == b.links_ && a.movements_ == b.movements_;
  }

 private:
  static std::uint64_t pair_key(LinkId a, LinkId b) { return (std::uint64_t{a.value} << 32) | b.value; }

  void build_caches() {
    const std::size_t n = intersections_.size();
    const std::size_t nl = links_.size();
    inputs_.assign(n, {});
    outputs_.assign(n, {});
    neighbors_.assign(n, {});
    at_.assign(n, {});
    upstream_.assign(nl, {});
    downstream_.assign(nl, {});
    from_.assign(nl, {});
    into_.assign(nl, {});
    is_boundary_.assign(n, false);
    boundary_.clear();
    entries_.clear();
    exits_.clear();
    by_pair_.clear();

    auto in_range = [n](const std::optional<IntersectionId>& i) { return i && i->index() < n; };
    for (std::size_t l = 0; l < nl; ++l) {
      const Link& link = links_[l];
      if (link.kind == LinkKind::Entry) entries_.emplace_back(l);
      if (link.kind == LinkKind::Exit) exits_.emplace_back(l);
      if (in_range(link.end)) inputs_[link.end->index()].emplace_back(l);
      if (in_range(link.start)) outputs_[link.start->index()].emplace_back(l);
      if (in_range(link.start) && in_range(link.end) && link.start != link.end) {
        neighbors_[link.start->index()].push_back(*link.end);
        neighbors_[link.end->index()].push_back(*link.start);
      }
      if (link.kind == LinkKind::Entry && in_range(link.end)) is_boundary_[link.end->index()] = true;
    }
    for (auto& ns : neighbors_) {
      std::sort(ns.begin(), ns.end());
      ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    }
    for (std::size_t i = 0; i < n; ++i)
      if (is_boundary_[i]) boundary_.emplace_back(i);

    for (std::size_t m = 0; m < movements_.size(); ++m) {
      const Movement& mv = movements_[m];
      if (mv.from.index() >= nl || mv.to.index() >= nl || mv.intersection.index() >= n) continue;
      from_[mv.from.index()].push_back(m);
      into_[mv.to.index()].push_back(m);
      at_[mv.intersection.index()].push_back(m);
      downstream_[mv.from.index()].push_back(mv.to);
      upstream_[mv.to.index()].push_back(mv.from);
      by_pair_.emplace(pair_key(mv.from, mv.to), m);
    }
  }

  std::vector<Intersection> intersections_;
  std::vector<Link> links_;
  std::vector<Movement> movements_;

  std::vector<std::vector<LinkId>> inputs_, outputs_;
  std::vector<std::vector<IntersectionId>> neighbors_;
  std::vector<std::vector<LinkId>> upstream_, downstream_;
  std::vector<std::vector<MovementIndex>> from_, into_, at_;
  std::vector<char> is_boundary_;
  std::vector<IntersectionId> boundary_;
  std::vector<LinkId> entries_, exits_;
  std::unordered_map<std::uint64_t, MovementIndex> by_pair_;
};

// Returns one human-readable entry per violated structural invariant.
// Movement checks are skipped for links that already failed their own
// checks, so a single broken link is reported once.
inline std::vector<std::string> validate(const RoadNetwork& net) {
  std::vector<std::string> out;
  const std::size_t n = net.intersection_count();
  const auto& links = net.links();
  auto name_of = [&](LinkId l) { return l.index() < links.size() ? links[l.index()].name : std::to_string(l.value); };

  std::vector<char> link_ok(links.size(), 1);
  for (std::size_t l = 0; l < links.size(); ++l) {
    const Link& k = links[l];
    std::string why;
    if (k.start && k.start->index() >= n) why = "unknown start intersection";
    else if (k.end && k.end->index() >= n) why = "unknown end intersection";
    else if (k.kind == LinkKind::Entry && (k.start || !k.end)) why = "entry link must have an end and no start";
    else if (k.kind == LinkKind::Exit && (!k.start || k.end)) why = "exit link must have a start and no end";
    else if (k.kind == LinkKind::Internal && (!k.start || !k.end)) why = "internal link needs both start and end";
    else if (k.kind == LinkKind::Internal && k.start == k.end) why = "internal link is a self-loop";
    else if (!(k.length_m > 0.0)) why = "length must be positive";
    else if (!(k.speed_mps > 0.0)) why = "speed must be positive";
    if (!why.empty()) {
      link_ok[l] = 0;
      out.push_back("link '" + k.name + "': " + why);
    }
  }

  const auto& mvs = net.movements();
  for (std::size_t m = 0; m < mvs.size(); ++m) {
    const Movement& mv = mvs[m];
    const std::string tag = "movement (" + name_of(mv.from) + "," + name_of(mv.to) + ")";
    if (mv.from.index() >= links.size() || mv.to.index() >= links.size() || mv.intersection.index() >= n) {
      out.push_back(tag + ": references an unknown link or intersection");
      continue;
    }
    if (!link_ok[mv.from.index()] || !link_ok[mv.to.index()]) continue;
    if (links[mv.from.index()].end != mv.intersection) out.push_back(tag + ": from-link does not enter its intersection");
    if (links[mv.to.index()].start != mv.intersection) out.push_back(tag + ": to-link does not leave its intersection");
    if (!(mv.sat_flow >= 0.0)) out.push_back(tag + ": negative saturation flow");
    if (net.find_movement(mv.from, mv.to) != m) out.push_back(tag + ": duplicate movement");
  }

  // Phase/turn consistency. Each approach carries at most one straight and
  // one left phase, both on the same axis, plus at most one unphased right
  // turn; a phase is shared by at most two opposing approaches.
  for (std::size_t i = 0; i < n; ++i) {
    IntersectionId id{i};
    std::array<int, kPhaseCount> approaches_per_phase{};
    for (LinkId l : net.inputs(id)) {
      if (!link_ok[l.index()]) continue;
      std::array<int, kPhaseCount> count{};
      int right_turns = 0;
      std::optional<Phase> axis;
      bool axis_conflict = false;
      for (MovementIndex m : net.movements_from(l)) {
        const auto& ph = mvs[m].phase;
        if (!ph) {
          ++right_turns;
          continue;
        }
        ++count[phase_index(*ph)];
        if (axis && !same_axis(*axis, *ph)) axis_conflict = true;
        axis = axis.value_or(*ph);
      }
      const std::string tag = "intersection '" + net.intersections()[i].name + "', approach '" + links[l.index()].name + "'";
      if (axis_conflict) out.push_back(tag + ": phases on both WE and SN axes");
      if (right_turns > 1) out.push_back(tag + ": more than one unphased movement");
      for (std::size_t p = 0; p < kPhaseCount; ++p) {
        if (count[p] > 1) out.push_back(tag + ": phase " + std::string(to_string(phase_from_index(p))) + " used twice");
        if (count[p] > 0) ++approaches_per_phase[p];
      }
    }
    for (std::size_t p = 0; p < kPhaseCount; ++p)
      if (approaches_per_phase[p] > 2)
        out.push_back("intersection '" + net.intersections()[i].name + "': phase " +
                      std::string(to_string(phase_from_index(p))) + " serves more than two approaches");
  }

  if (n == 0) {
    out.push_back("network has no intersections");
  } else {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> bfs;
    bfs.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!bfs.empty()) {
      auto u = bfs.front();
      bfs.pop();
      for (IntersectionId v : net.neighbors(IntersectionId{u}))
        if (!seen[v.index()]) {
          seen[v.index()] = 1;
          ++reached;
          bfs.push(v.index());
        }
    }
    if (reached != n) out.push_back("intersection graph is disconnected (" + std::to_string(reached) + " of " + std::to_string(n) + " reachable)");
  }
  return out;
}

namespace detail {

// Compass side of an intersection. Row 0 of a grid is the north edge.
enum class Side : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

constexpr Side opposite(Side s) { return static_cast<Side>((static_cast<int>(s) + 2) % 4); }
// Heading of a vehicle leaving toward side s; turning left from heading h
// means leaving toward the side counter-clockwise of h.
constexpr Side left_of(Side heading) { return static_cast<Side>((static_cast<int>(heading) + 3) % 4); }
constexpr Side right_of(Side heading) { return static_cast<Side>((static_cast<int>(heading) + 1) % 4); }

}  // namespace detail

// Rows x cols grid of four-way, two-way intersections. Every intersection
// gets a link in and out on each side; sides without a neighbour get entry
// and exit stubs.
inline RoadNetwork build_grid(std::size_t rows, std::size_t cols, double h_len, double v_len,
                              double sat_flow = kDefaultPhasedFlow, double right_turn_flow = kDefaultRightTurnFlow,
                              double speed_mps = kDefaultSpeedMps) {
  using detail::Side;
  if (rows == 0 || cols == 0) throw std::invalid_argument("build_grid: rows and cols must be >= 1");
  if (!(h_len > 0.0) || !(v_len > 0.0)) throw std::invalid_argument("build_grid: link lengths must be positive");
  if (!(speed_mps > 0.0)) throw std::invalid_argument("build_grid: speed must be positive");
  if (!(sat_flow >= 0.0) || !(right_turn_flow >= 0.0)) throw std::invalid_argument("build_grid: negative saturation flow");

  const std::size_t n = rows * cols;
  std::vector<Intersection> nodes(n);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      nodes[r * cols + c] = {std::to_string(r * cols + c), static_cast<double>(c) * h_len, -static_cast<double>(r) * v_len};

  auto neighbour = [&](std::size_t i, Side s) -> std::optional<std::size_t> {
    const std::size_t r = i / cols, c = i % cols;
    switch (s) {
      case Side::North: return r > 0 ? std::optional(i - cols) : std::nullopt;
      case Side::South: return r + 1 < rows ? std::optional(i + cols) : std::nullopt;
      case Side::West: return c > 0 ? std::optional(i - 1) : std::nullopt;
      case Side::East: return c + 1 < cols ? std::optional(i + 1) : std::nullopt;
    }
    return std::nullopt;
  };
  auto length_for = [&](Side s) { return (s == Side::East || s == Side::West) ? h_len : v_len; };

  std::vector<Link> links;
  // out_link[i][side] leaves i toward side; in_link[i][side] arrives at i from side.
  std::vector<std::array<std::size_t, 4>> out_link(n), in_link(n);
  auto add_link = [&](LinkKind kind, std::optional<std::size_t> start, std::optional<std::size_t> end, Side s) {
    Link k;
    k.name = std::to_string(links.size());
    k.kind = kind;
    if (start) k.start = IntersectionId{*start};
    if (end) k.end = IntersectionId{*end};
    k.length_m = length_for(s);
    k.speed_mps = speed_mps;
    links.push_back(std::move(k));
    return links.size() - 1;
  };

  for (std::size_t i = 0; i < n; ++i)
    for (int s = 0; s < 4; ++s) {
      const Side side = static_cast<Side>(s);
      if (auto j = neighbour(i, side)) {
        const std::size_t id = add_link(LinkKind::Internal, i, *j, side);
        out_link[i][s] = id;
        in_link[*j][static_cast<int>(detail::opposite(side))] = id;
      }
    }
  for (std::size_t i = 0; i < n; ++i)
    for (int s = 0; s < 4; ++s)
      if (!neighbour(i, static_cast<Side>(s))) in_link[i][s] = add_link(LinkKind::Entry, std::nullopt, i, static_cast<Side>(s));
  for (std::size_t i = 0; i < n; ++i)
    for (int s = 0; s < 4; ++s)
      if (!neighbour(i, static_cast<Side>(s))) out_link[i][s] = add_link(LinkKind::Exit, i, std::nullopt, static_cast<Side>(s));

  std::vector<Movement> movements;
  movements.reserve(n * 12);
  for (std::size_t i = 0; i < n; ++i)
    for (int s = 0; s < 4; ++s) {
      const Side from_side = static_cast<Side>(s);
      const Side heading = detail::opposite(from_side);
      const bool we = heading == Side::East || heading == Side::West;
      const LinkId in{in_link[i][s]};
      const IntersectionId at{i};
      movements.push_back({in, LinkId{out_link[i][static_cast<int>(heading)]}, at,
                           we ? Phase::WEStraight : Phase::SNStraight, sat_flow});
      movements.push_back({in, LinkId{out_link[i][static_cast<int>(detail::left_of(heading))]}, at,
                           we ? Phase::WELeft : Phase::SNLeft, sat_flow});
      movements.push_back({in, LinkId{out_link[i][static_cast<int>(detail::right_of(heading))]}, at, std::nullopt,
                           right_turn_flow});
    }
  return RoadNetwork(std::move(nodes), std::move(links), std::move(movements));
}

// --- Roadnet JSON ---------------------------------------------------------

inline nlohmann::json to_json(const RoadNetwork& net) {
  using nlohmann::json;
  json doc;
  doc["intersections"] = json::array();
  for (const auto& i : net.intersections()) doc["intersections"].push_back({{"id", i.name}, {"x", i.x}, {"y", i.y}});
  doc["links"] = json::array();
  for (const auto& k : net.links()) {
    json j{{"id", k.name}, {"kind", std::string(to_string(k.kind))}, {"length_m", k.length_m}, {"speed_mps", k.speed_mps}};
    if (k.start) j["start"] = net.intersection(*k.start).name;
    if (k.end) j["end"] = net.intersection(*k.end).name;
    doc["links"].push_back(std::move(j));
  }
  doc["movements"] = json::array();
  for (const auto& m : net.movements()) {
    json j{{"from", net.link(m.from).name}, {"to", net.link(m.to).name}, {"intersection", net.intersection(m.intersection).name},
           {"sat_flow", m.sat_flow}};
    if (m.phase) j["phase"] = std::string(to_string(*m.phase));
    doc["movements"].push_back(std::move(j));
  }
  return doc;
}

namespace detail {

// Ids may be written as strings or integers.
inline std::string id_string(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw LoadError(where + ": id must be a string or integer");
}

inline double positive_number(const nlohmann::json& obj, const char* key, const std::string& where,
                              std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw LoadError(where + ": missing '" + key + "'");
  }
  if (!obj[key].is_number()) throw LoadError(where + ": '" + key + "' must be a number");
  return obj[key].get<double>();
}

}  // namespace detail

inline RoadNetwork network_from_json(const nlohmann::json& doc) {
  using detail::id_string;
  if (!doc.is_object()) throw LoadError("roadnet: top level must be an object");
  for (const char* key : {"intersections", "links", "movements"})
    if (!doc.contains(key) || !doc[key].is_array()) throw LoadError(std::string("roadnet: missing array '") + key + "'");

  std::vector<Intersection> nodes;
  std::unordered_map<std::string, std::size_t> node_ix;
  for (const auto& j : doc["intersections"]) {
    if (!j.is_object() || !j.contains("id")) throw LoadError("intersection without id");
    Intersection i;
    i.name = id_string(j["id"], "intersection");
    i.x = j.value("x", 0.0);
    i.y = j.value("y", 0.0);
    if (!node_ix.emplace(i.name, nodes.size()).second) throw LoadError("intersection '" + i.name + "': duplicate id");
    nodes.push_back(std::move(i));
  }
  auto lookup_node = [&](const nlohmann::json& v, const std::string& where) {
    const std::string name = id_string(v, where);
    auto it = node_ix.find(name);
    if (it == node_ix.end()) throw LoadError(where + ": unknown intersection '" + name + "'");
    return IntersectionId{it->second};
  };

  std::vector<Link> links;
  std::unordered_map<std::string, std::size_t> link_ix;
  for (const auto& j : doc["links"]) {
    if (!j.is_object() || !j.contains("id")) throw LoadError("link without id");
    Link k;
    k.name = id_string(j["id"], "link");
    const std::string where = "link '" + k.name + "'";
    const std::string kind = j.value("kind", std::string{});
    if (kind == "entry") k.kind = LinkKind::Entry;
    else if (kind == "internal") k.kind = LinkKind::Internal;
    else if (kind == "exit") k.kind = LinkKind::Exit;
    else throw LoadError(where + ": kind must be entry, internal or exit");
    if (j.contains("start") && !j["start"].is_null()) k.start = lookup_node(j["start"], where);
    if (j.contains("end") && !j["end"].is_null()) k.end = lookup_node(j["end"], where);
    k.length_m = detail::positive_number(j, "length_m", where);
    k.speed_mps = detail::positive_number(j, "speed_mps", where, kDefaultSpeedMps);
    if (!link_ix.emplace(k.name, links.size()).second) throw LoadError(where + ": duplicate id");
    links.push_back(std::move(k));
  }
  auto lookup_link = [&](const nlohmann::json& v, const std::string& where) {
    const std::string name = id_string(v, where);
    auto it = link_ix.find(name);
    if (it == link_ix.end()) throw LoadError(where + ": unknown link '" + name + "'");
    return LinkId{it->second};
  };

  std::vector<Movement> movements;
  for (const auto& j : doc["movements"]) {
    if (!j.is_object() || !j.contains("from") || !j.contains("to") || !j.contains("intersection"))
      throw LoadError("movement: requires from, to and intersection");
    const std::string where = "movement (" + id_string(j["from"], "movement") + "," + id_string(j["to"], "movement") + ")";
    Movement m;
    m.from = lookup_link(j["from"], where);
    m.to = lookup_link(j["to"], where);
    m.intersection = lookup_node(j["intersection"], where);
    if (j.contains("phase") && !j["phase"].is_null()) {
      const auto p = parse_phase(j["phase"].is_string() ? j["phase"].get<std::string>() : std::string{});
      if (!p) throw LoadError(where + ": unknown phase");
      m.phase = *p;
    }
    m.sat_flow = detail::positive_number(j, "sat_flow", where);
    movements.push_back(m);
  }

  RoadNetwork net(std::move(nodes), std::move(links), std::move(movements));
  if (auto problems = validate(net); !problems.empty()) {
    std::string msg = "invalid roadnet: " + problems.front();
    if (problems.size() > 1) msg += " (+" + std::to_string(problems.size() - 1) + " more)";
    throw LoadError(msg);
  }
  return net;
}

inline RoadNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open roadnet file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError("roadnet '" + path + "': " + e.what());
  }
  return network_from_json(doc);
}

inline void save_network(const RoadNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_json(net).dump(2) << '\n';
}

}  // namespace sigcoord
