#include "ccasim/geometry.hpp"

#include <cstdlib>
#include <string>

namespace ccasim {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::North: return "N";
    case Direction::East: return "E";
    case Direction::South: return "S";
    case Direction::West: return "W";
  }
  return "?";
}

std::string_view to_string(Topology t) { return t == Topology::Mesh ? "mesh" : "torus"; }

Topology parse_topology(std::string_view text) {
  if (text == "mesh" || text == "Mesh") return Topology::Mesh;
  if (text == "torus" || text == "torusmesh" || text == "TorusMesh" || text == "torus-mesh")
    return Topology::TorusMesh;
  throw ConfigError("unknown topology '" + std::string(text) + "'");
}

void ChipConfig::validate() const {
  if (dim_x < 2 || dim_y < 2) throw ConfigError("chip dimensions must be at least 2x2");
  if (vc_buffer_capacity < 1) throw ConfigError("vc_buffer_capacity must be positive");
  if (vc_count < 1) throw ConfigError("vc_count must be positive");
  if (topology == Topology::TorusMesh && vc_count < 2)
    throw ConfigError("a torus-mesh needs at least two virtual channels");
}

namespace {

Coordinate step(Coordinate c, Direction d) {
  switch (d) {
    case Direction::North: return {c.x, c.y - 1};
    case Direction::East: return {c.x + 1, c.y};
    case Direction::South: return {c.x, c.y + 1};
    case Direction::West: return {c.x - 1, c.y};
  }
  return c;
}

// +1, -1 or 0 along one axis. Ties on a torus go the direct (non-wrap) way.
int axis_step(int from, int to, int dim, bool torus) {
  if (from == to) return 0;
  if (!torus) return to > from ? 1 : -1;
  const int forward = ((to - from) % dim + dim) % dim;
  const int backward = dim - forward;
  if (forward < backward) return 1;
  if (backward < forward) return -1;
  return to > from ? 1 : -1;
}

std::uint32_t axis_distance(int a, int b, int dim, bool torus) {
  const int d = std::abs(a - b);
  return static_cast<std::uint32_t>(torus ? std::min(d, dim - d) : d);
}

std::uint32_t isqrt(std::uint64_t n) {
  std::uint64_t r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return static_cast<std::uint32_t>(r);
}

}  // namespace

bool crosses_wrap(Coordinate c, Direction d, const ChipConfig& cfg) {
  if (!cfg.torus()) return false;
  switch (d) {
    case Direction::North: return c.y == 0;
    case Direction::East: return c.x == cfg.dim_x - 1;
    case Direction::South: return c.y == cfg.dim_y - 1;
    case Direction::West: return c.x == 0;
  }
  return false;
}

std::optional<Coordinate> neighbor(Coordinate c, Direction d, const ChipConfig& cfg) {
  Coordinate n = step(c, d);
  if (cfg.contains(n)) return n;
  if (!cfg.torus()) return std::nullopt;
  n.x = (n.x + cfg.dim_x) % cfg.dim_x;
  n.y = (n.y + cfg.dim_y) % cfg.dim_y;
  return n;
}

Hop route_next_hop(Coordinate current, const RouteState& state, const ChipConfig& cfg) {
  const bool torus = cfg.torus();
  Direction dir;
  if (const int sx = axis_step(current.x, state.dst.x, cfg.dim_x, torus); sx != 0) {
    dir = sx > 0 ? Direction::East : Direction::West;
  } else {
    const int sy = axis_step(current.y, state.dst.y, cfg.dim_y, torus);
    dir = sy > 0 ? Direction::South : Direction::North;
  }

  RouteState next = state;
  const bool turn =
      state.last_direction.has_value() && is_horizontal(*state.last_direction) != is_horizontal(dir);
  if (turn) ++next.turns_taken;
  if (turn || crosses_wrap(current, dir, cfg)) next.current_vc = (next.current_vc + 1) % cfg.vc_count;
  next.last_direction = dir;
  return {dir, next};
}

std::uint32_t minimal_distance(Coordinate a, Coordinate b, const ChipConfig& cfg) {
  return axis_distance(a.x, b.x, cfg.dim_x, cfg.torus()) +
         axis_distance(a.y, b.y, cfg.dim_y, cfg.torus());
}

std::uint32_t throttle_period(const ChipConfig& cfg) {
  const auto sq = static_cast<std::uint64_t>(cfg.dim_x) * static_cast<std::uint64_t>(cfg.dim_x) +
                  static_cast<std::uint64_t>(cfg.dim_y) * static_cast<std::uint64_t>(cfg.dim_y);
  const std::uint32_t hyp = isqrt(sq);
  return cfg.torus() ? hyp / 2 : hyp;
}

}  // namespace ccasim
