#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccasim/apps.hpp"
#include "ccasim/geometry.hpp"
#include "ccasim/graph.hpp"
#include "ccasim/graph_store.hpp"
#include "ccasim/metrics.hpp"
#include "ccasim/runtime.hpp"

namespace ccasim {

/// Malformed edge-list input; carries the offending line number.
class IngestError : public std::runtime_error {
 public:
  IngestError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct WeightRange {
  std::int64_t min = 1;
  std::int64_t max = 10;
};

struct GraphSpec {
  std::string path;                 // edge-list file; overrides the generator when set
  std::string generator = "rmat";   // rmat | er | path | star | hub
  std::uint64_t seed = 1;
  std::uint32_t scale = 10;
  std::uint32_t edge_factor = 16;
  double rmat_a = 0.45;
  double rmat_b = 0.25;
  double rmat_c = 0.15;
  std::uint32_t n = 1000;           // er, path and star sizes
  std::uint64_t m = 9000;
  std::uint32_t hub_vertices = 4096;
  std::uint32_t hub_in_degree = 2048;
  std::uint32_t hub_background_degree = 4;
  std::uint32_t hub_out_degree = 16;
  WeightRange weights;
};

struct OutputSpec {
  std::string stats;
  std::string json;
  std::string frames_dir;
  std::uint64_t frames_stride = 0;
  bool verify = true;
  std::uint64_t cycle_cap = 100'000'000;
};

struct ExperimentConfig {
  ChipConfig chip;
  GraphSpec graph;
  AppParams app;
  StructureParams structure;
  OutputSpec output;
  bool lco_set_charged = false;
  EnergyModel energy;

  void validate() const;
};

/// Sets one flat key; throws ConfigError for unknown keys or bad values.
void set_key(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// Applies a `key=value` override.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);
/// Parses flat `key = value` text (`#` comments, blank lines ignored).
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);
/// Every key in a stable order, formatted so that parse_config round-trips.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);
std::string serialize_config(const ExperimentConfig& cfg);

struct LoadedGraph {
  EdgeList graph;
  std::vector<std::uint64_t> original_ids;  // dense id -> id in the file
};

LoadedGraph parse_edge_list(std::string_view text, WeightRange weights, std::uint64_t seed);
LoadedGraph load_edge_list(const std::string& path, WeightRange weights, std::uint64_t seed);
std::string format_edge_list(const EdgeList& g);

EdgeList generate_rmat(std::uint32_t scale, std::uint32_t edge_factor, double a, double b, double c,
                       std::uint64_t seed, WeightRange weights = {});
EdgeList generate_er(std::uint32_t n, std::uint64_t m, std::uint64_t seed, WeightRange weights = {});
EdgeList generate_path(std::uint32_t n, std::uint64_t seed = 1, WeightRange weights = {});
/// Bidirectional star around hub 0 with `leaves` spokes.
EdgeList generate_star(std::uint32_t leaves, std::uint64_t seed = 1, WeightRange weights = {});
/// Hub 0 with `in_degree` distinct in-neighbours over a sparse random background.
EdgeList generate_hub(std::uint32_t vertices, std::uint32_t in_degree, std::uint32_t background_degree,
                      std::uint32_t out_degree, std::uint64_t seed, WeightRange weights = {});

EdgeList make_graph(const GraphSpec& spec);

struct GraphProfile {
  VertexId vertices = 0;
  std::size_t edges = 0;
  double mean_out_degree = 0.0;
  std::uint32_t max_in_degree = 0;
  std::uint32_t max_out_degree = 0;
  double mean_sssp_length = 0.0;  // mean hop distance from up to 100 sampled sources
};

GraphProfile profile_graph(const EdgeList& g, std::uint64_t seed);

std::vector<std::int64_t> bfs_oracle(const EdgeList& g, VertexId source);
std::vector<double> sssp_oracle(const EdgeList& g, VertexId source);
std::vector<double> pagerank_oracle(const EdgeList& g, std::uint32_t iterations, double damping);

struct Verdict {
  bool pass = true;
  std::string detail;
};

inline constexpr double kPageRankTolerance = 1e-9;

Verdict compare_with_oracle(const EdgeList& g, const AppParams& app, const AppResult& result);

struct ExperimentResult {
  RunStats stats;
  AppResult result;
  BuildReport build;
  std::optional<Verdict> verdict;
  bool rhizomes_consistent = true;
  Fields fields;  // config columns followed by stats columns
  std::vector<CongestionFrame> frames;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const EdgeList& graph);

/// Cartesian product of `key=v1,v2,...` axes applied over `base`.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base,
                                           const std::vector<std::string>& axes);

}  // namespace ccasim
