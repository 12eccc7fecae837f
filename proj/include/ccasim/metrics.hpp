#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccasim/geometry.hpp"
#include "ccasim/runtime.hpp"

namespace ccasim {

/// Energy coefficients. Defaults are a documented profile, not measured values.
struct EnergyModel {
  double e_hop = 4e-12;            // J per flit-hop
  double torus_link_factor = 1.5;  // multiplier on hop energy for torus links
  double e_op = 1.5e-12;           // J per busy compute cycle
  double e_sram_access = 2e-12;    // J per 64-bit word
  double p_leak_cell = 2e-5;       // W per cell
  double cycle_time = 5e-9;        // s per cycle

  void validate() const;
};

struct RunStats {
  Topology topology = Topology::Mesh;
  std::uint32_t cells = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t messages_created = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t total_hops = 0;
  std::uint64_t contention_total = 0;
  std::array<std::uint64_t, 4> contention_by_direction{};
  std::vector<std::array<std::uint64_t, 4>> cell_contention;  // [cell][N,E,S,W]
  std::uint64_t peak_network_occupancy = 0;
  std::uint64_t vc_high_water_sum = 0;
  CellCounters totals;
  std::vector<std::uint64_t> cell_delivered;
  std::vector<std::uint64_t> cell_busy;
  std::vector<std::uint64_t> cell_sram;
};

RunStats collect(const Simulator& sim);

struct EnergyBreakdown {
  double network = 0.0;
  double compute = 0.0;
  double sram = 0.0;
  double leakage = 0.0;
  double total() const { return network + compute + sram + leakage; }
};

EnergyBreakdown energy_breakdown(const RunStats& stats, const EnergyModel& em);
double total_energy(const RunStats& stats, const EnergyModel& em);

struct ContentionHistogram {
  std::uint32_t bins = 25;
  std::uint64_t max = 0;
  double bin_width = 0.0;
  std::array<std::vector<std::uint64_t>, 4> counts;  // per direction, cell counts per bin
};

/// Per-direction histogram of per-cell link contention over [0, max].
ContentionHistogram contention_histogram(const RunStats& stats, std::uint32_t bins = 25);

/// Ordered (name, value) pairs; the order is the stable CSV column order.
using Fields = std::vector<std::pair<std::string, std::string>>;

Fields stats_fields(const RunStats& stats, const EnergyModel& em);

std::string format_double(double v);
std::string csv_header(const Fields& f);
std::string csv_row(const Fields& f);
std::string to_json(const Fields& f);

/// One frame as CSV: dim_y lines of dim_x comma-separated status letters.
std::string frame_csv(const CongestionFrame& frame);

}  // namespace ccasim
