#include <doctest.h>

#include <json.hpp>
#include <numeric>

#include "support.hpp"

using namespace ccasim;
using ccasim::testing::chip;
using ccasim::testing::make_run;
using ccasim::testing::structure;

namespace {

RunStats synthetic(Topology topo) {
  RunStats s;
  s.topology = topo;
  s.cells = 256;
  s.total_cycles = 1000;
  s.total_hops = 12345;
  s.totals.compute_cycles_busy = 777;
  s.totals.sram_word_accesses = 4321;
  return s;
}

std::uint64_t mass(const std::vector<std::uint64_t>& v) { return std::accumulate(v.begin(), v.end(), 0ull); }

}  // namespace

TEST_SUITE("metrics-energy") {
  TEST_CASE("an empty run costs only leakage") {
    GraphStore store(chip(16));
    Simulator sim(chip(16), store, ActionRegistry{});
    for (int i = 0; i < 10; ++i) sim.step();
    const RunStats s = collect(sim);
    const EnergyModel em;
    const EnergyBreakdown e = energy_breakdown(s, em);
    CHECK(e.network == 0.0);
    CHECK(e.compute == 0.0);
    CHECK(e.sram == 0.0);
    CHECK(e.leakage == doctest::Approx(256 * 10 * em.p_leak_cell * em.cycle_time));
    CHECK(total_energy(s, em) == e.leakage);
  }

  TEST_CASE("energy terms follow the sum decomposition") {
    EnergyModel em;
    const RunStats s = synthetic(Topology::Mesh);
    const EnergyBreakdown e = energy_breakdown(s, em);
    CHECK(e.network == doctest::Approx(12345 * em.e_hop));
    CHECK(e.compute == doctest::Approx(777 * em.e_op));
    CHECK(e.sram == doctest::Approx(4321 * em.e_sram_access));
    CHECK(e.total() == doctest::Approx(e.network + e.compute + e.sram + e.leakage));
  }

  TEST_CASE("torus links cost exactly half again as much") {
    const EnergyModel em;
    const double mesh = energy_breakdown(synthetic(Topology::Mesh), em).network;
    const double torus = energy_breakdown(synthetic(Topology::TorusMesh), em).network;
    CHECK(torus == 1.5 * mesh);
  }

  TEST_CASE("doubling hops doubles the network term") {
    const EnergyModel em;
    RunStats s = synthetic(Topology::Mesh);
    const double one = energy_breakdown(s, em).network;
    s.total_hops *= 2;
    CHECK(energy_breakdown(s, em).network == 2 * one);
  }

  TEST_CASE("energy is monotone in every coefficient and counter") {
    const RunStats base = synthetic(Topology::TorusMesh);
    const EnergyModel em;
    const double e0 = total_energy(base, em);
    for (int i = 0; i < 6; ++i) {
      EnergyModel m = em;
      double* coef[] = {&m.e_hop, &m.torus_link_factor, &m.e_op, &m.e_sram_access, &m.p_leak_cell, &m.cycle_time};
      *coef[i] *= 1.25;
      CHECK(total_energy(base, m) >= e0);
    }
    for (int i = 0; i < 5; ++i) {
      RunStats s = base;
      std::uint64_t* ctr[] = {&s.total_hops, &s.totals.compute_cycles_busy, &s.totals.sram_word_accesses,
                              &s.total_cycles, nullptr};
      if (ctr[i])
        *ctr[i] += 10;
      else
        s.cells += 1;
      CHECK(total_energy(s, em) >= e0);
    }
  }

  TEST_CASE("negative coefficients are rejected") {
    EnergyModel em;
    em.e_op = -1.0;
    CHECK_THROWS_AS(em.validate(), ConfigError);
  }

  TEST_CASE("all-zero contention lands in one bin") {
    RunStats s;
    s.cell_contention.assign(64, {0, 0, 0, 0});
    const auto h = contention_histogram(s);
    for (int d = 0; d < 4; ++d) {
      REQUIRE(h.counts[d].size() == 25);
      CHECK(h.counts[d][0] == 64);
      CHECK(mass(h.counts[d]) == 64);
    }
  }

  TEST_CASE("a single hot cell sits alone in the top bin") {
    RunStats s;
    s.cell_contention.assign(64, {0, 0, 0, 0});
    s.cell_contention[17][1] = 100;
    const auto h = contention_histogram(s, 25);
    CHECK(h.max == 100);
    CHECK(h.counts[1][24] == 1);
    CHECK(h.counts[1][0] == 63);
    CHECK(mass(h.counts[1]) == 64);
  }

  TEST_CASE("skewed traffic congests east-west more than north-south") {
    ExperimentConfig cfg;
    cfg.chip = chip(16, Topology::TorusMesh);
    cfg.graph.generator = "hub";
    cfg.graph.hub_vertices = 1024;
    cfg.graph.hub_in_degree = 512;
    cfg.app.source = 1;
    cfg.structure.rpvo_max = 1;
    const auto r = run_experiment(cfg);
    REQUIRE(r.verdict->pass);
    const auto h = contention_histogram(r.stats);
    std::uint64_t ew = 0, ns = 0;
    for (const auto& c : r.stats.cell_contention) {
      ns += c[0] + c[2];
      ew += c[1] + c[3];
    }
    CHECK(ew > ns);
    for (int d = 0; d < 4; ++d) CHECK(mass(h.counts[d]) == r.stats.cells);
  }

  TEST_CASE("congestion frames") {
    SUBCASE("an idle chip is all idle") {
      GraphStore store(chip(8));
      RuntimeOptions opt;
      opt.frames_stride = 100;
      Simulator sim(chip(8), store, ActionRegistry{}, opt);
      for (int i = 0; i < 1000; ++i) sim.step();
      REQUIRE(sim.frames().size() == 10);
      for (const auto& f : sim.frames()) CHECK(f.cells == std::string(64, 'I'));
      CHECK(sim.frames()[3].cycle == 300);
      const std::string csv = frame_csv(sim.frames()[0]);
      CHECK(csv.rfind("I,I,I,I,I,I,I,I\n", 0) == 0);
      CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
    }
    SUBCASE("a halted cell shows as throttled") {
      GraphStore store(chip(8));
      RuntimeOptions opt;
      opt.frames_stride = 1;
      Simulator sim(chip(8), store, ActionRegistry{}, opt);
      sim.step();
      record_refusal(sim.network().link(9, Direction::East), 0);
      REQUIRE(sim.throttle_check(9));
      sim.step();
      REQUIRE(sim.frames().size() == 2);
      CHECK(sim.frames()[1].cells[9] == 'T');
      CHECK(sim.frames()[1].cells[8] == 'I');
    }
  }

  TEST_CASE("hop audit matches the network counter") {
    auto r = make_run(chip(16), ccasim::testing::rmat10(), structure(4), AppParams{});
    r.sim->run(5'000'000);
    const RunStats s = collect(*r.sim);
    CHECK(s.total_hops > 0);
    CHECK(s.total_hops == r.sim->audited_hops());
    CHECK(s.messages_delivered <= s.messages_created);
    CHECK(s.messages_delivered == r.sim->messages_delivered());
  }

  TEST_CASE("stats rows are deterministic and mirror to JSON") {
    ExperimentConfig cfg;
    cfg.chip = chip(8);
    cfg.graph.generator = "er";
    cfg.graph.n = 200;
    cfg.graph.m = 1000;
    cfg.app.app = AppKind::SSSP;
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    CHECK(csv_row(a.fields) == csv_row(b.fields));
    CHECK(csv_header(a.fields) == csv_header(b.fields));
    const auto j = nlohmann::json::parse(to_json(a.fields));
    CHECK(j.size() == a.fields.size());
    CHECK(j.at("total_cycles").get<std::uint64_t>() == a.stats.total_cycles);
    CHECK(j.at("app").get<std::string>() == "sssp");
    const auto header = csv_header(a.fields);
    CHECK(header.find("energy_total_j") != std::string::npos);
    CHECK(header.find("diffusions_pruned") != std::string::npos);
  }

  TEST_CASE("double formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, 0.1 + 0.2}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.45) == "0.45");
    CHECK(format_double(4e-12) == "4e-12");
  }
}
