#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "ccasim/geometry.hpp"

namespace ccasim {

/// Global (PGAS) object address: owning cell plus slot in that cell's store.
struct Address {
  Coordinate cell;
  std::uint32_t slot = 0;

  friend auto operator<=>(const Address&, const Address&) = default;
};

enum class ActionKind : std::uint8_t { BFS, SSSP, PageRank, RhizomeShare, LcoSet, Germinate };

inline constexpr std::size_t kActionKindCount = 6;

std::string_view to_string(ActionKind k);

inline constexpr std::int64_t kUnreachedLevel = std::numeric_limits<std::int64_t>::max();

/// Operand record carried by one flit. `aux` is interpreted per application
/// (e.g. which gate an LcoSet addresses, or a trigger marker).
struct Payload {
  std::int64_t level = 0;
  double value = 0.0;
  std::uint32_t iteration = 0;
  std::uint16_t rank = 0;
  std::uint8_t aux = 0;

  friend bool operator==(const Payload&, const Payload&) = default;
};

static_assert(sizeof(Payload) * 8 <= 256, "payload must fit one 256-bit flit");

struct ActionMessage {
  Address target;
  ActionKind kind = ActionKind::BFS;
  Payload payload;
  RouteState route;
  // Simulator bookkeeping, not part of the flit.
  std::uint32_t hops = 0;
  std::uint64_t moved_at = std::numeric_limits<std::uint64_t>::max();
};

}  // namespace ccasim
