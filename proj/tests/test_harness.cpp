#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <queue>
#include <set>
#include <string>

#include "support.hpp"

using namespace ccasim;
using ccasim::testing::chip;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "ccasim_harness_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CCASIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double chi_square(const std::vector<std::uint32_t>& observed, double expected) {
  double x = 0.0;
  for (auto o : observed) x += (o - expected) * (o - expected) / expected;
  return x;
}

ExperimentConfig path_config() {
  ExperimentConfig cfg;
  cfg.chip = chip(2);
  cfg.graph.generator = "path";
  cfg.graph.n = 3;
  return cfg;
}

}  // namespace

TEST_SUITE("harness-cli") {
  TEST_CASE("edge list loader") {
    auto g = parse_edge_list("0 1\n1 2\n", {}, 1);
    CHECK(g.graph.num_vertices == 3);
    CHECK(g.graph.edges.size() == 2);
    g = parse_edge_list("0 1 5", {}, 1);
    CHECK(g.graph.edges[0].weight == 5.0);
    g = parse_edge_list("# header\n% other\n\n0 1 2\n", {}, 1);
    CHECK(g.graph.edges.size() == 1);
    for (const auto& e : parse_edge_list("0 1\n1 2\n2 0\n", {3, 7}, 9).graph.edges) {
      CHECK(e.weight >= 3);
      CHECK(e.weight <= 7);
      CHECK(e.weight == std::floor(e.weight));
    }
  }

  TEST_CASE("sparse ids are compacted in sorted order") {
    const auto g = parse_edge_list("100 7\n7 5000\n", {}, 1);
    CHECK(g.graph.num_vertices == 3);
    CHECK(g.original_ids == std::vector<std::uint64_t>{7, 100, 5000});
    CHECK(g.graph.edges[0] == InputEdge{1, 0, g.graph.edges[0].weight});
    CHECK(g.graph.edges[1].dst == 2);
  }

  TEST_CASE("loader errors carry line numbers") {
    auto line_of = [](const std::string& text) -> std::size_t {
      try {
        parse_edge_list(text, {}, 1);
      } catch (const IngestError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of("0 1\n# c\nx 2\n") == 3);
    CHECK(line_of("0 1\n1 2 -4\n") == 2);
    CHECK(line_of("0\n") == 1);
    CHECK(line_of("0 1 2 3\n") == 1);
    CHECK(line_of("0 1 w\n") == 1);
    CHECK_THROWS_AS(load_edge_list("/nonexistent/graph.txt", {}, 1), ConfigError);
    const auto path = write_scratch("tiny.el", "1 2 3\n");
    CHECK(load_edge_list(path, {}, 1).graph.edges.size() == 1);
  }

  TEST_CASE("RMAT size, skew and reproducibility") {
    const EdgeList g = generate_rmat(10, 16, 0.45, 0.25, 0.15, 1);
    CHECK(g.num_vertices == 1024);
    CHECK(g.edges.size() == 16384);
    const auto in = g.in_degrees();
    const double mean = 16384.0 / 1024.0;
    CHECK(*std::max_element(in.begin(), in.end()) > 10 * mean);
    CHECK(generate_rmat(10, 16, 0.45, 0.25, 0.15, 1) == g);
    CHECK_FALSE(generate_rmat(10, 16, 0.45, 0.25, 0.15, 2) == g);
    CHECK_THROWS_AS(generate_rmat(10, 16, 0.5, 0.4, 0.2, 1), ConfigError);
    CHECK_THROWS_AS(generate_rmat(1, 16, 0.25, 0.25, 0.25, 1), ConfigError);
  }

  TEST_CASE("symmetric RMAT is uniform over endpoints") {
    // 16 vertices, 4096 edges: chi-square with 15 degrees of freedom.
    // 37.70 is the 0.999 quantile.
    const EdgeList g = generate_rmat(4, 256, 0.25, 0.25, 0.25, 11);
    CHECK(chi_square(g.out_degrees(), 256.0) < 37.70);
    CHECK(chi_square(g.in_degrees(), 256.0) < 37.70);
  }

  TEST_CASE("Erdos-Renyi generator") {
    const EdgeList full = generate_er(4, 12, 1);
    std::set<std::pair<VertexId, VertexId>> pairs;
    for (const auto& e : full.edges) {
      CHECK(e.src != e.dst);
      pairs.insert({e.src, e.dst});
    }
    CHECK(pairs.size() == 12);
    const EdgeList g = generate_er(1000, 9000, 3);
    CHECK(static_cast<double>(g.edges.size()) / g.num_vertices == 9.0);
    CHECK(generate_er(1000, 9000, 3) == g);
    CHECK_THROWS_AS(generate_er(4, 13, 1), ConfigError);
  }

  TEST_CASE("hub generator shape") {
    const EdgeList g = generate_hub(4096, 2048, 4, 16, 1);
    const auto in = g.in_degrees();
    CHECK(in[0] == 2048);
    CHECK(g.out_degrees()[0] == 16);
    CHECK(*std::max_element(in.begin() + 1, in.end()) < 100);
  }

  TEST_CASE("oracles on hand-checked graphs") {
    CHECK(bfs_oracle(generate_path(3), 0) == std::vector<std::int64_t>{0, 1, 2});
    EdgeList tri;
    tri.num_vertices = 3;
    tri.edges = {{0, 1, 1}, {1, 2, 1}, {0, 2, 3}};
    CHECK(sssp_oracle(tri, 0) == std::vector<double>{0, 1, 2});
    EdgeList cyc;
    cyc.num_vertices = 2;
    cyc.edges = {{0, 1, 1}, {1, 0, 1}};
    const auto s = pagerank_oracle(cyc, 30, 0.85);
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[1] == doctest::Approx(0.5));
  }

  TEST_CASE("PageRank oracle agrees with a direct dense iteration") {
    const EdgeList g = generate_rmat(6, 4, 0.45, 0.25, 0.15, 5);
    const VertexId n = g.num_vertices;
    const auto out = g.out_degrees();
    std::vector<double> x(n, 1.0 / n);
    for (int k = 0; k < 12; ++k) {
      double dangling = 0.0;
      for (VertexId v = 0; v < n; ++v)
        if (out[v] == 0) dangling += x[v];
      std::vector<double> next(n, 0.0);
      for (const auto& e : g.edges) next[e.dst] += x[e.src] / out[e.src];
      for (VertexId v = 0; v < n; ++v) next[v] = 0.15 / n + 0.85 * (next[v] + dangling / n);
      x = next;
    }
    const auto o = pagerank_oracle(g, 12, 0.85);
    for (VertexId v = 0; v < n; ++v) CHECK(o[v] == doctest::Approx(x[v]).epsilon(1e-12));
  }

  TEST_CASE("BFS oracle agrees with an independent traversal") {
    const EdgeList g = generate_er(300, 900, 4);
    std::vector<std::vector<VertexId>> adj(g.num_vertices);
    for (const auto& e : g.edges) adj[e.src].push_back(e.dst);
    std::vector<std::int64_t> lvl(g.num_vertices, kUnreachedLevel);
    std::queue<VertexId> q;
    lvl[7] = 0;
    q.push(7);
    while (!q.empty()) {
      const VertexId u = q.front();
      q.pop();
      for (VertexId w : adj[u])
        if (lvl[w] == kUnreachedLevel) {
          lvl[w] = lvl[u] + 1;
          q.push(w);
        }
    }
    CHECK(bfs_oracle(g, 7) == lvl);
  }

  TEST_CASE("run_experiment on a path") {
    const auto r = run_experiment(path_config());
    REQUIRE(r.verdict.has_value());
    CHECK(r.verdict->pass);
    CHECK(r.stats.total_cycles > 0);
    CHECK(r.stats.messages_created >= 2);
  }

  TEST_CASE("identical configs give identical rows") {
    ExperimentConfig cfg;
    cfg.chip = chip(16);
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    CHECK(csv_row(a.fields) == csv_row(b.fields));
  }

  TEST_CASE("structure knob does not change BFS levels") {
    ExperimentConfig cfg;
    cfg.chip = chip(16);
    cfg.structure.rpvo_max = 1;
    const auto a = run_experiment(cfg);
    cfg.structure.rpvo_max = 8;
    const auto b = run_experiment(cfg);
    CHECK(a.verdict->pass);
    CHECK(b.verdict->pass);
    CHECK(a.result.level == b.result.level);
  }

  TEST_CASE("config parsing, overrides and round-trip") {
    ExperimentConfig cfg = parse_config("# comment\ndim_x = 8\ndim_y=8\ntopology = torus\napp = sssp\nrpvo_max = 4\n");
    CHECK(cfg.chip.dim_x == 8);
    CHECK(cfg.chip.topology == Topology::TorusMesh);
    CHECK(cfg.app.app == AppKind::SSSP);
    CHECK(cfg.structure.rpvo_max == 4);
    apply_override(cfg, "rpvo_max=2");
    CHECK(cfg.structure.rpvo_max == 2);
    cfg.energy.e_hop = 1.0 / 3.0;
    const ExperimentConfig back = parse_config(serialize_config(cfg));
    CHECK(serialize_config(back) == serialize_config(cfg));
    CHECK(back.energy.e_hop == cfg.energy.e_hop);
    cfg.graph.generator = "er";
    cfg.graph.n = 200;
    cfg.graph.m = 800;
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(parse_config(serialize_config(cfg)));
    CHECK(csv_row(a.fields) == csv_row(b.fields));
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("dim_x = eight\n"), ConfigError);
    CHECK_THROWS_AS(apply_override(*std::make_unique<ExperimentConfig>(), "dim_x"), ConfigError);
    try {
      parse_config("dim_x = 4\n\nvc_count = x\n");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    ExperimentConfig cfg;
    cfg.app.source = 5000;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  }

  TEST_CASE("sweep expands the cartesian product") {
    const auto runs = expand_sweep(ExperimentConfig{}, {"rpvo_max=1,4,8", "topology=mesh,torus"});
    REQUIRE(runs.size() == 6);
    CHECK(runs[0].structure.rpvo_max == 1);
    CHECK(runs[1].chip.topology == Topology::TorusMesh);
    CHECK(runs[5].structure.rpvo_max == 8);
    CHECK_THROWS_AS(expand_sweep(ExperimentConfig{}, {"rpvo_max"}), ConfigError);
  }

  TEST_CASE("command-line exit codes") {
    const auto dir = scratch_dir();
    const std::string stats = (dir / "run.csv").string();
    CHECK(cli("run -s dim_x=4 -s dim_y=4 -s generator=path -s n=5 --stats " + stats) == 0);
    std::ifstream in(stats);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("dim_x,", 0) == 0);
    CHECK_FALSE(row.empty());
    CHECK(cli("run -s no_such_key=1") == 1);
    CHECK(cli("run -c /nonexistent/config.txt") == 1);
    const std::string bad = write_scratch("bad.el", "0 1\n1 zz\n");
    CHECK(cli("run -s graph=" + bad) == 1);
    CHECK(cli("run -s cycle_cap=5") == 3);
    CHECK(cli("sweep -s dim_x=4 -s dim_y=4 -s generator=path -s n=4 --sweep rpvo_max=1,2") == 0);
    CHECK(cli("verify -s generator=path -s n=4") == 0);
    const std::string el = (dir / "gen.el").string();
    CHECK(cli("gen -s generator=er -s n=50 -s m=100 --profile -o " + el) == 0);
    CHECK(load_edge_list(el, {}, 1).graph.edges.size() == 100);
  }
}
