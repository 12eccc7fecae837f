#include "support.hpp"

#include <deque>
#include <random>
#include <vector>

namespace ccasim::testing {

TrafficResult run_random_traffic(const ChipConfig& chip, std::uint32_t messages, std::uint64_t seed,
                                 std::uint64_t cycle_limit) {
  Network net(chip);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<CellId> pick(0, chip.cell_count() - 1);
  std::vector<std::deque<ActionMessage>> pending(chip.cell_count());
  for (std::uint32_t i = 0; i < messages; ++i) {
    const CellId src = pick(rng);
    CellId dst = pick(rng);
    while (dst == src) dst = pick(rng);
    ActionMessage m;
    m.target = Address{chip.coord_of(dst), 0};
    m.route.src = chip.coord_of(src);
    pending[src].push_back(m);
  }
  TrafficResult r;
  std::uint64_t waiting = messages;
  std::vector<std::pair<CellId, ActionMessage>> out;
  for (std::uint64_t cycle = 0; (waiting > 0 || net.in_flight() > 0) && cycle < cycle_limit; ++cycle) {
    const bool busy = net.in_flight() > 0;
    out.clear();
    const std::size_t moved = net.advance(cycle, out);
    if (busy && moved == 0) ++r.stalled_cycles;
    for (const auto& [cell, m] : out) {
      ++r.delivered;
      if (chip.coord_of(cell) != m.target.cell ||
          m.hops != minimal_distance(m.route.src, m.target.cell, chip))
        ++r.misrouted;
    }
    for (CellId c = 0; c < chip.cell_count(); ++c) {
      if (pending[c].empty()) continue;
      if (net.inject(c, pending[c].front(), cycle)) {
        pending[c].pop_front();
        --waiting;
        ++r.injected;
      }
    }
    try {
      net.assert_buffer_safety();
    } catch (const std::exception&) {
      ++r.buffer_violations;
    }
    r.cycles = cycle + 1;
  }
  return r;
}

AppRun make_run(const ChipConfig& chip, const EdgeList& g, const StructureParams& structure,
                const AppParams& app, RuntimeOptions options) {
  AppRun run;
  run.store = std::make_unique<GraphStore>(chip);
  run.build = build_graph(*run.store, g, structure);
  run.sim = std::make_unique<Simulator>(chip, *run.store, make_registry(app, *run.store), options);
  germinate(*run.sim, app);
  return run;
}

ChipConfig chip(std::int32_t dim, Topology topo) {
  ChipConfig c;
  c.dim_x = dim;
  c.dim_y = dim;
  c.topology = topo;
  return c;
}

StructureParams structure(std::uint32_t rpvo_max) {
  StructureParams s;
  s.rpvo_max = rpvo_max;
  return s;
}

EdgeList rmat10(std::uint64_t seed) { return generate_rmat(10, 16, 0.45, 0.25, 0.15, seed); }

EdgeList er1000(std::uint64_t seed) { return generate_er(1000, 9000, seed); }

}  // namespace ccasim::testing
