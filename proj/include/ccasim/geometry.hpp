#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ccasim {

/// Raised for any invalid user-facing configuration value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Topology : std::uint8_t { Mesh, TorusMesh };

// North is -y, South is +y; rows grow downwards.
enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::North, Direction::East,
                                                      Direction::South, Direction::West};

constexpr bool is_horizontal(Direction d) { return d == Direction::East || d == Direction::West; }

std::string_view to_string(Direction d);
std::string_view to_string(Topology t);
Topology parse_topology(std::string_view text);

using CellId = std::uint32_t;

struct Coordinate {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend auto operator<=>(const Coordinate&, const Coordinate&) = default;
};

struct ChipConfig {
  std::int32_t dim_x = 16;
  std::int32_t dim_y = 16;
  Topology topology = Topology::Mesh;
  std::int32_t vc_count = 4;
  std::int32_t vc_buffer_capacity = 4;
  bool throttling_enabled = true;
  std::uint64_t rng_seed = 1;

  void validate() const;

  CellId cell_count() const { return static_cast<CellId>(dim_x) * static_cast<CellId>(dim_y); }
  CellId id_of(Coordinate c) const { return static_cast<CellId>(c.y * dim_x + c.x); }
  Coordinate coord_of(CellId id) const {
    return {static_cast<std::int32_t>(id % static_cast<CellId>(dim_x)),
            static_cast<std::int32_t>(id / static_cast<CellId>(dim_x))};
  }
  bool contains(Coordinate c) const { return c.x >= 0 && c.x < dim_x && c.y >= 0 && c.y < dim_y; }
  bool torus() const { return topology == Topology::TorusMesh; }
};

/// Per-message routing state carried in the flit header.
struct RouteState {
  Coordinate src;
  Coordinate dst;
  std::int32_t current_vc = 0;
  std::uint32_t turns_taken = 0;
  std::optional<Direction> last_direction;

  friend bool operator==(const RouteState&, const RouteState&) = default;
};

struct Hop {
  Direction direction;
  RouteState state;
};

/// Neighbour reached by leaving `c` through `d`; empty at a mesh edge.
std::optional<Coordinate> neighbor(Coordinate c, Direction d, const ChipConfig& cfg);

/// True when leaving `c` through `d` uses a torus wrap-around link.
bool crosses_wrap(Coordinate c, Direction d, const ChipConfig& cfg);

/// Horizontal-first dimension-order routing, minimal on both topologies.
/// The VC index moves to the next class whenever the hop turns or wraps.
Hop route_next_hop(Coordinate current, const RouteState& state, const ChipConfig& cfg);

/// Analytic minimal hop count between two cells.
std::uint32_t minimal_distance(Coordinate a, Coordinate b, const ChipConfig& cfg);

/// Halt window applied after neighbour congestion: the chip hypotenuse,
/// halved on a torus, rounded down.
std::uint32_t throttle_period(const ChipConfig& cfg);

}  // namespace ccasim
