#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sigcoord {

// Dense index into one of the network tables. The tag keeps link and
// intersection indices from being mixed up.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(Id, Id) = default;
};

using LinkId = Id<struct LinkTag>;
using IntersectionId = Id<struct IntersectionTag>;

inline constexpr std::size_t kPhaseCount = 4;

enum class Phase : std::uint8_t {
  WEStraight = 0,
  WELeft = 1,
  SNStraight = 2,
  SNLeft = 3,
};

inline constexpr std::array<Phase, kPhaseCount> kAllPhases = {
    Phase::WEStraight, Phase::WELeft, Phase::SNStraight, Phase::SNLeft};

constexpr std::size_t phase_index(Phase p) { return static_cast<std::size_t>(p); }
constexpr Phase phase_from_index(std::size_t i) { return static_cast<Phase>(i); }

// Both WE phases share an approach axis, as do both SN phases.
constexpr bool same_axis(Phase a, Phase b) { return (phase_index(a) / 2) == (phase_index(b) / 2); }

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::WEStraight: return "WE-Straight";
    case Phase::WELeft: return "WE-Left";
    case Phase::SNStraight: return "SN-Straight";
    case Phase::SNLeft: return "SN-Left";
  }
  return "?";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  for (Phase p : kAllPhases)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

// One phase per intersection, indexed by IntersectionId.
using JointAssignment = std::vector<Phase>;

// Per-phase cost vector of a single agent.
using PhaseCosts = std::array<double, kPhaseCount>;

// Error types. All derive from the std hierarchy so callers can catch broadly.
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};
struct UndefinedMetricError : std::domain_error {
  using std::domain_error::domain_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sigcoord

template <class Tag>
struct std::hash<sigcoord::Id<Tag>> {
  std::size_t operator()(sigcoord::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
