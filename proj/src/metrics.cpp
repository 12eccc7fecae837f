#include "ccasim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

namespace ccasim {

void EnergyModel::validate() const {
  for (double c : {e_hop, torus_link_factor, e_op, e_sram_access, p_leak_cell, cycle_time})
    if (!(c >= 0.0)) throw ConfigError("energy coefficients must be non-negative");
}

RunStats collect(const Simulator& sim) {
  const ChipConfig& chip = sim.chip();
  const Network& net = sim.network();
  RunStats s;
  s.topology = chip.topology;
  s.cells = chip.cell_count();
  s.total_cycles = sim.cycle();
  s.messages_created = sim.messages_created();
  s.messages_delivered = sim.messages_delivered();
  s.total_hops = net.total_hops();
  s.peak_network_occupancy = net.peak_occupancy();
  s.vc_high_water_sum = net.vc_high_water_sum();
  s.totals = sim.totals();
  s.cell_contention.resize(s.cells);
  for (CellId c = 0; c < s.cells; ++c) {
    for (Direction d : kDirections) {
      const auto v = net.link(c, d).contention_cycles;
      s.cell_contention[c][static_cast<std::size_t>(d)] = v;
      s.contention_by_direction[static_cast<std::size_t>(d)] += v;
      s.contention_total += v;
    }
    const CellCounters& k = sim.cells()[c].counters;
    s.cell_delivered.push_back(k.messages_delivered);
    s.cell_busy.push_back(k.compute_cycles_busy);
    s.cell_sram.push_back(k.sram_word_accesses);
  }
  return s;
}

EnergyBreakdown energy_breakdown(const RunStats& stats, const EnergyModel& em) {
  EnergyBreakdown e;
  const double factor = stats.topology == Topology::TorusMesh ? em.torus_link_factor : 1.0;
  e.network = static_cast<double>(stats.total_hops) * em.e_hop * factor;
  e.compute = static_cast<double>(stats.totals.compute_cycles_busy) * em.e_op;
  e.sram = static_cast<double>(stats.totals.sram_word_accesses) * em.e_sram_access;
  e.leakage = static_cast<double>(stats.cells) * static_cast<double>(stats.total_cycles) *
              em.p_leak_cell * em.cycle_time;
  return e;
}

double total_energy(const RunStats& stats, const EnergyModel& em) {
  return energy_breakdown(stats, em).total();
}

ContentionHistogram contention_histogram(const RunStats& stats, std::uint32_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  ContentionHistogram h;
  h.bins = bins;
  for (const auto& cell : stats.cell_contention)
    for (auto v : cell) h.max = std::max(h.max, v);
  h.bin_width = h.max == 0 ? 0.0 : static_cast<double>(h.max) / bins;
  for (auto& c : h.counts) c.assign(bins, 0);
  for (const auto& cell : stats.cell_contention) {
    for (std::size_t d = 0; d < 4; ++d) {
      std::size_t bin = 0;
      if (h.max > 0)
        bin = std::min<std::size_t>(bins - 1, static_cast<std::size_t>(cell[d] * bins / h.max));
      ++h.counts[d][bin];
    }
  }
  return h;
}

// Shortest %g form that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

Fields stats_fields(const RunStats& s, const EnergyModel& em) {
  Fields f;
  auto put = [&f](const char* k, std::uint64_t v) { f.emplace_back(k, std::to_string(v)); };
  auto putd = [&f](const char* k, double v) { f.emplace_back(k, format_double(v)); };
  const CellCounters& t = s.totals;
  put("total_cycles", s.total_cycles);
  put("messages_created", s.messages_created);
  put("messages_delivered", s.messages_delivered);
  put("total_hops", s.total_hops);
  put("contention_total", s.contention_total);
  put("contention_n", s.contention_by_direction[0]);
  put("contention_e", s.contention_by_direction[1]);
  put("contention_s", s.contention_by_direction[2]);
  put("contention_w", s.contention_by_direction[3]);
  put("peak_network_occupancy", s.peak_network_occupancy);
  put("vc_high_water_sum", s.vc_high_water_sum);
  put("actions_delivered", t.actions_delivered);
  put("actions_invoked", t.actions_invoked);
  put("actions_predicate_true", t.actions_predicate_true);
  put("actions_predicate_false", t.actions_predicate_false);
  put("actions_overlapped", t.actions_overlapped);
  put("diffusions_created", t.diffusions_created);
  put("diffusions_pruned", t.diffusions_pruned);
  put("propagates_staged", t.propagates_staged);
  put("filter_evaluations", t.filter_evaluations);
  put("work_cycles", t.work_cycles);
  put("compute_cycles_busy", t.compute_cycles_busy);
  put("sram_word_accesses", t.sram_word_accesses);
  put("lco_sets", t.lco_sets);
  put("action_queue_hwm", t.action_queue_hwm);
  put("diffuse_queue_hwm", t.diffuse_queue_hwm);
  put("max_cell_delivered",
      s.cell_delivered.empty() ? 0 : *std::max_element(s.cell_delivered.begin(), s.cell_delivered.end()));
  const EnergyBreakdown e = energy_breakdown(s, em);
  putd("energy_network_j", e.network);
  putd("energy_compute_j", e.compute);
  putd("energy_sram_j", e.sram);
  putd("energy_leakage_j", e.leakage);
  putd("energy_total_j", e.total());
  return f;
}

namespace {

std::string csv_escape(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string csv_header(const Fields& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_escape(f[i].first);
  return out;
}

std::string csv_row(const Fields& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_escape(f[i].second);
  return out;
}

std::string to_json(const Fields& f) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  // Numeric columns are emitted as JSON numbers, the rest as strings.
  for (const auto& [k, v] : f) {
    auto parsed = nlohmann::ordered_json::parse(v, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_number())
      j[k] = parsed;
    else
      j[k] = v;
  }
  return j.dump(2);
}

std::string frame_csv(const CongestionFrame& frame) {
  std::string out;
  for (std::int32_t y = 0; y < frame.dim_y; ++y) {
    for (std::int32_t x = 0; x < frame.dim_x; ++x) {
      if (x) out += ',';
      out += frame.cells[static_cast<std::size_t>(y * frame.dim_x + x)];
    }
    out += '\n';
  }
  return out;
}

}  // namespace ccasim
