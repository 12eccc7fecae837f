// Command-line driver: run, sweep, gen, verify.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccasim/harness.hpp"

namespace {

using namespace ccasim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitCycleCap = 3;

ExperimentConfig assemble(const std::string& config_path, const std::vector<std::string>& overrides) {
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  for (const auto& o : overrides) apply_override(cfg, o);
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

void write_frames(const ExperimentConfig& cfg, const ExperimentResult& r) {
  if (cfg.output.frames_dir.empty() || r.frames.empty()) return;
  std::filesystem::create_directories(cfg.output.frames_dir);
  for (const auto& f : r.frames) {
    char name[64];
    std::snprintf(name, sizeof name, "frame_%010llu.csv", static_cast<unsigned long long>(f.cycle));
    write_file((std::filesystem::path(cfg.output.frames_dir) / name).string(), frame_csv(f));
  }
}

int exit_for(const ExperimentResult& r) {
  if (r.verdict && !r.verdict->pass) {
    std::cerr << "oracle mismatch: " << r.verdict->detail << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_run(const std::string& config, const std::vector<std::string>& overrides) {
  const ExperimentConfig cfg = assemble(config, overrides);
  const ExperimentResult r = run_experiment(cfg);
  const std::string csv = csv_header(r.fields) + "\n" + csv_row(r.fields) + "\n";
  if (cfg.output.stats.empty())
    std::cout << csv;
  else
    write_file(cfg.output.stats, csv);
  if (!cfg.output.json.empty()) write_file(cfg.output.json, to_json(r.fields) + "\n");
  write_frames(cfg, r);
  return exit_for(r);
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& overrides,
              const std::vector<std::string>& axes) {
  const ExperimentConfig base = assemble(config, overrides);
  std::string csv;
  int status = kExitOk;
  for (const auto& cfg : expand_sweep(base, axes)) {
    const ExperimentResult r = run_experiment(cfg);
    if (csv.empty()) csv = csv_header(r.fields) + "\n";
    csv += csv_row(r.fields) + "\n";
    if (exit_for(r) != kExitOk) status = kExitMismatch;
  }
  if (base.output.stats.empty())
    std::cout << csv;
  else
    write_file(base.output.stats, csv);
  return status;
}

int cmd_gen(const std::string& config, const std::vector<std::string>& overrides, const std::string& out,
            bool profile) {
  const ExperimentConfig cfg = assemble(config, overrides);
  const EdgeList g = make_graph(cfg.graph);
  if (out.empty())
    std::cout << format_edge_list(g);
  else
    write_file(out, format_edge_list(g));
  if (profile) {
    const GraphProfile p = profile_graph(g, cfg.graph.seed);
    std::cerr << "vertices " << p.vertices << "\nedges " << p.edges << "\nmean_out_degree "
              << format_double(p.mean_out_degree) << "\nmax_in_degree " << p.max_in_degree
              << "\nmax_out_degree " << p.max_out_degree << "\nmean_sssp_length "
              << format_double(p.mean_sssp_length) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& config, const std::vector<std::string>& overrides) {
  const ExperimentConfig cfg = assemble(config, overrides);
  cfg.validate();
  const EdgeList g = make_graph(cfg.graph);
  std::cout << "vertex,value\n";
  switch (cfg.app.app) {
    case AppKind::BFS: {
      const auto l = bfs_oracle(g, cfg.app.source);
      for (VertexId v = 0; v < g.num_vertices; ++v)
        std::cout << v << "," << (l[v] == kUnreachedLevel ? std::string("inf") : std::to_string(l[v])) << "\n";
      break;
    }
    case AppKind::SSSP: {
      const auto d = sssp_oracle(g, cfg.app.source);
      for (VertexId v = 0; v < g.num_vertices; ++v) std::cout << v << "," << format_double(d[v]) << "\n";
      break;
    }
    case AppKind::PageRank: {
      const auto s = pagerank_oracle(g, cfg.app.iterations, cfg.app.damping);
      for (VertexId v = 0; v < g.num_vertices; ++v) std::cout << v << "," << format_double(s[v]) << "\n";
      break;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level simulator of a message-driven manycore chip running diffusive graph programs"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  std::vector<std::string> axes;
  std::string out;
  std::string stats;
  std::string json;
  bool profile = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "flat key = value configuration file");
    sub->add_option("-s,--set", overrides, "key=value override (repeatable, wins over the file)");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run);
  run->add_option("--stats", stats, "write the stats CSV row here");
  run->add_option("--json", json, "write a JSON mirror of the stats row here");

  CLI::App* sweep = app.add_subcommand("sweep", "run the cartesian product of the listed keys");
  add_common(sweep);
  sweep->add_option("--sweep", axes, "key=v1,v2,... axis (repeatable)")->required();
  sweep->add_option("--stats", stats, "write the stats CSV here");

  CLI::App* gen = app.add_subcommand("gen", "emit a synthetic edge list");
  add_common(gen);
  gen->add_option("-o,--out", out, "output path (stdout when omitted)");
  gen->add_flag("--profile", profile, "print degree and path-length statistics to stderr");

  CLI::App* verify = app.add_subcommand("verify", "print the sequential oracle's per-vertex result");
  add_common(verify);

  CLI11_PARSE(app, argc, argv);

  if (!stats.empty()) overrides.push_back("stats=" + stats);
  if (!json.empty()) overrides.push_back("json=" + json);

  try {
    if (*run) return cmd_run(config, overrides);
    if (*sweep) return cmd_sweep(config, overrides, axes);
    if (*gen) return cmd_gen(config, overrides, out, profile);
    if (*verify) return cmd_verify(config, overrides);
  } catch (const CycleCapExceeded& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kExitCycleCap;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IngestError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
