#include "ccasim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

#include <Eigen/SparseCore>

namespace ccasim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  if (!parse_int(v, out))
    throw ConfigError("key '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
  return out;
}

double to_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  if (!parse_real(v, out))
    throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("key '" + std::string(key) + "' expects a boolean, got '" + std::string(v) + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct KeyDef {
  const char* name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define CCASIM_INT_KEY(NAME, FIELD)                                                                \
  KeyDef {                                                                                         \
    NAME, [](ExperimentConfig& c, std::string_view v) { c.FIELD = to_int<decltype(c.FIELD)>(NAME, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }                          \
  }
#define CCASIM_REAL_KEY(NAME, FIELD)                                                \
  KeyDef {                                                                          \
    NAME, [](ExperimentConfig& c, std::string_view v) { c.FIELD = to_real(NAME, v); }, \
        [](const ExperimentConfig& c) { return format_double(c.FIELD); }            \
  }
#define CCASIM_BOOL_KEY(NAME, FIELD)                                                \
  KeyDef {                                                                          \
    NAME, [](ExperimentConfig& c, std::string_view v) { c.FIELD = to_bool(NAME, v); }, \
        [](const ExperimentConfig& c) { return bool_str(c.FIELD); }                 \
  }
#define CCASIM_STR_KEY(NAME, FIELD)                                                     \
  KeyDef {                                                                              \
    NAME, [](ExperimentConfig& c, std::string_view v) { c.FIELD = std::string(trim(v)); }, \
        [](const ExperimentConfig& c) { return c.FIELD; }                               \
  }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> keys{
      CCASIM_INT_KEY("dim_x", chip.dim_x),
      CCASIM_INT_KEY("dim_y", chip.dim_y),
      KeyDef{"topology",
             [](ExperimentConfig& c, std::string_view v) { c.chip.topology = parse_topology(trim(v)); },
             [](const ExperimentConfig& c) { return std::string(to_string(c.chip.topology)); }},
      CCASIM_INT_KEY("vc_count", chip.vc_count),
      CCASIM_INT_KEY("vc_buffer_capacity", chip.vc_buffer_capacity),
      CCASIM_BOOL_KEY("throttling", chip.throttling_enabled),
      CCASIM_INT_KEY("seed", chip.rng_seed),
      CCASIM_STR_KEY("graph", graph.path),
      CCASIM_STR_KEY("generator", graph.generator),
      CCASIM_INT_KEY("graph_seed", graph.seed),
      CCASIM_INT_KEY("scale", graph.scale),
      CCASIM_INT_KEY("edge_factor", graph.edge_factor),
      CCASIM_REAL_KEY("rmat_a", graph.rmat_a),
      CCASIM_REAL_KEY("rmat_b", graph.rmat_b),
      CCASIM_REAL_KEY("rmat_c", graph.rmat_c),
      CCASIM_INT_KEY("n", graph.n),
      CCASIM_INT_KEY("m", graph.m),
      CCASIM_INT_KEY("hub_vertices", graph.hub_vertices),
      CCASIM_INT_KEY("hub_in_degree", graph.hub_in_degree),
      CCASIM_INT_KEY("hub_background_degree", graph.hub_background_degree),
      CCASIM_INT_KEY("hub_out_degree", graph.hub_out_degree),
      CCASIM_INT_KEY("weight_min", graph.weights.min),
      CCASIM_INT_KEY("weight_max", graph.weights.max),
      KeyDef{"app", [](ExperimentConfig& c, std::string_view v) { c.app.app = parse_app(trim(v)); },
             [](const ExperimentConfig& c) { return std::string(to_string(c.app.app)); }},
      CCASIM_INT_KEY("source", app.source),
      CCASIM_INT_KEY("iterations", app.iterations),
      CCASIM_REAL_KEY("damping", app.damping),
      CCASIM_INT_KEY("rpvo_max", structure.rpvo_max),
      CCASIM_INT_KEY("local_edge_list_size", structure.local_edge_list_size),
      CCASIM_INT_KEY("ghost_children", structure.ghost_children),
      KeyDef{"allocator",
             [](ExperimentConfig& c, std::string_view v) {
               c.structure.allocator.mode = parse_allocator_mode(trim(v));
             },
             [](const ExperimentConfig& c) { return std::string(to_string(c.structure.allocator.mode)); }},
      CCASIM_INT_KEY("vicinity_radius", structure.allocator.vicinity_radius),
      CCASIM_BOOL_KEY("lco_set_charged", lco_set_charged),
      CCASIM_REAL_KEY("e_hop", energy.e_hop),
      CCASIM_REAL_KEY("torus_link_factor", energy.torus_link_factor),
      CCASIM_REAL_KEY("e_op", energy.e_op),
      CCASIM_REAL_KEY("e_sram_access", energy.e_sram_access),
      CCASIM_REAL_KEY("p_leak_cell", energy.p_leak_cell),
      CCASIM_REAL_KEY("cycle_time", energy.cycle_time),
      CCASIM_BOOL_KEY("verify", output.verify),
      CCASIM_INT_KEY("cycle_cap", output.cycle_cap),
      CCASIM_INT_KEY("frames_stride", output.frames_stride),
      CCASIM_STR_KEY("frames_dir", output.frames_dir),
      CCASIM_STR_KEY("stats", output.stats),
      CCASIM_STR_KEY("json", output.json),
  };
  return keys;
}

#undef CCASIM_INT_KEY
#undef CCASIM_REAL_KEY
#undef CCASIM_BOOL_KEY
#undef CCASIM_STR_KEY

// Output destinations do not affect a run and stay out of the stats row.
bool is_output_path(std::string_view key) {
  return key == "stats" || key == "json" || key == "frames_dir";
}

std::mt19937_64 weight_rng(std::uint64_t seed) { return std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ULL); }

void assign_weights(EdgeList& g, std::uint64_t seed, WeightRange w) {
  if (w.min < 0 || w.max < w.min) throw ConfigError("weight range must satisfy 0 <= min <= max");
  auto rng = weight_rng(seed);
  std::uniform_int_distribution<std::int64_t> pick(w.min, w.max);
  for (auto& e : g.edges) e.weight = static_cast<double>(pick(rng));
}

}  // namespace

void ExperimentConfig::validate() const {
  chip.validate();
  structure.validate();
  energy.validate();
  if (app.damping < 0.0 || app.damping > 1.0) throw ConfigError("damping must lie in [0, 1]");
  if (output.cycle_cap == 0) throw ConfigError("cycle_cap must be positive");
  if (graph.weights.min < 0 || graph.weights.max < graph.weights.min)
    throw ConfigError("weight range must satisfy 0 <= weight_min <= weight_max");
}

void set_key(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const auto& k : key_table()) {
    if (key == k.name) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  set_key(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(base, line);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : key_table()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
  return out;
}

LoadedGraph parse_edge_list(std::string_view text, WeightRange weights, std::uint64_t seed) {
  if (weights.min < 0 || weights.max < weights.min)
    throw ConfigError("weight range must satisfy 0 <= min <= max");
  struct Raw {
    std::uint64_t src, dst;
    std::optional<double> weight;
  };
  std::vector<Raw> raw;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == '%') continue;
    std::vector<std::string_view> tok;
    while (!line.empty()) {
      const auto sp = line.find_first_of(" \t");
      tok.push_back(line.substr(0, sp));
      line = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
    }
    if (tok.size() < 2 || tok.size() > 3)
      throw IngestError(line_no, "expected 'src dst [weight]'");
    Raw r{};
    if (!parse_int(tok[0], r.src)) throw IngestError(line_no, "non-numeric source '" + std::string(tok[0]) + "'");
    if (!parse_int(tok[1], r.dst))
      throw IngestError(line_no, "non-numeric destination '" + std::string(tok[1]) + "'");
    if (tok.size() == 3) {
      double w = 0.0;
      if (!parse_real(tok[2], w)) throw IngestError(line_no, "non-numeric weight '" + std::string(tok[2]) + "'");
      if (w < 0.0) throw IngestError(line_no, "negative weight");
      r.weight = w;
    }
    raw.push_back(r);
  }
  LoadedGraph out;
  for (const auto& r : raw) {
    out.original_ids.push_back(r.src);
    out.original_ids.push_back(r.dst);
  }
  std::sort(out.original_ids.begin(), out.original_ids.end());
  out.original_ids.erase(std::unique(out.original_ids.begin(), out.original_ids.end()),
                         out.original_ids.end());
  auto dense = [&](std::uint64_t id) {
    return static_cast<VertexId>(
        std::lower_bound(out.original_ids.begin(), out.original_ids.end(), id) - out.original_ids.begin());
  };
  out.graph.num_vertices = static_cast<VertexId>(out.original_ids.size());
  auto rng = weight_rng(seed);
  std::uniform_int_distribution<std::int64_t> pick(weights.min, weights.max);
  for (const auto& r : raw) {
    const double w = r.weight ? *r.weight : static_cast<double>(pick(rng));
    out.graph.edges.push_back(InputEdge{dense(r.src), dense(r.dst), w});
  }
  return out;
}

LoadedGraph load_edge_list(const std::string& path, WeightRange weights, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read edge list '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str(), weights, seed);
}

std::string format_edge_list(const EdgeList& g) {
  std::string out;
  for (const auto& e : g.edges)
    out += std::to_string(e.src) + " " + std::to_string(e.dst) + " " + format_double(e.weight) + "\n";
  return out;
}

EdgeList generate_rmat(std::uint32_t scale, std::uint32_t edge_factor, double a, double b, double c,
                       std::uint64_t seed, WeightRange weights) {
  if (scale < 2 || scale > 30) throw ConfigError("rmat scale must lie in [2, 30]");
  if (a < 0 || b < 0 || c < 0 || a + b + c > 1.0 + 1e-12)
    throw ConfigError("rmat probabilities must be non-negative with a+b+c <= 1");
  EdgeList g;
  g.num_vertices = VertexId{1} << scale;
  const std::uint64_t m = static_cast<std::uint64_t>(edge_factor) << scale;
  g.edges.reserve(m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t i = 0; i < m; ++i) {
    VertexId src = 0, dst = 0;
    for (std::uint32_t bit = 0; bit < scale; ++bit) {
      const double r = u(rng);
      // Quadrants: a (0,0), b (1,0), c (0,1), d (1,1) as (src bit, dst bit).
      const bool src_bit = (r >= a && r < a + b) || r >= a + b + c;
      const bool dst_bit = r >= a + b;
      src = (src << 1) | static_cast<VertexId>(src_bit);
      dst = (dst << 1) | static_cast<VertexId>(dst_bit);
    }
    g.edges.push_back(InputEdge{src, dst, 1.0});
  }
  assign_weights(g, seed, weights);
  return g;
}

EdgeList generate_er(std::uint32_t n, std::uint64_t m, std::uint64_t seed, WeightRange weights) {
  if (n < 1) throw ConfigError("er needs at least one vertex");
  const std::uint64_t max_m = static_cast<std::uint64_t>(n) * (n - 1);
  if (m > max_m)
    throw ConfigError("er edge count " + std::to_string(m) + " exceeds n(n-1) = " + std::to_string(max_m));
  EdgeList g;
  g.num_vertices = n;
  std::mt19937_64 rng(seed);
  if (m * 2 > max_m) {
    std::vector<InputEdge> all;
    all.reserve(max_m);
    for (VertexId s = 0; s < n; ++s)
      for (VertexId d = 0; d < n; ++d)
        if (s != d) all.push_back(InputEdge{s, d, 1.0});
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(m);
    g.edges = std::move(all);
  } else {
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<VertexId> pick(0, n - 1);
    while (g.edges.size() < m) {
      const VertexId s = pick(rng), d = pick(rng);
      if (s == d || !seen.insert(static_cast<std::uint64_t>(s) * n + d).second) continue;
      g.edges.push_back(InputEdge{s, d, 1.0});
    }
  }
  assign_weights(g, seed, weights);
  return g;
}

EdgeList generate_path(std::uint32_t n, std::uint64_t seed, WeightRange weights) {
  if (n < 1) throw ConfigError("path needs at least one vertex");
  EdgeList g;
  g.num_vertices = n;
  for (VertexId v = 0; v + 1 < n; ++v) g.edges.push_back(InputEdge{v, v + 1, 1.0});
  assign_weights(g, seed, weights);
  return g;
}

EdgeList generate_star(std::uint32_t leaves, std::uint64_t seed, WeightRange weights) {
  EdgeList g;
  g.num_vertices = leaves + 1;
  for (VertexId v = 1; v <= leaves; ++v) g.edges.push_back(InputEdge{0, v, 1.0});
  for (VertexId v = 1; v <= leaves; ++v) g.edges.push_back(InputEdge{v, 0, 1.0});
  assign_weights(g, seed, weights);
  return g;
}

EdgeList generate_hub(std::uint32_t vertices, std::uint32_t in_degree, std::uint32_t background_degree,
                      std::uint32_t out_degree, std::uint64_t seed, WeightRange weights) {
  if (vertices < 3) throw ConfigError("hub graph needs at least three vertices");
  if (in_degree > vertices - 1 || out_degree > vertices - 1)
    throw ConfigError("hub degree exceeds the number of other vertices");
  EdgeList g;
  g.num_vertices = vertices;
  std::mt19937_64 rng(seed);
  std::vector<VertexId> others(vertices - 1);
  std::iota(others.begin(), others.end(), VertexId{1});
  std::shuffle(others.begin(), others.end(), rng);
  std::vector<char> feeds_hub(vertices, 0);
  for (std::uint32_t i = 0; i < in_degree; ++i) feeds_hub[others[i]] = 1;
  std::shuffle(others.begin(), others.end(), rng);
  for (std::uint32_t i = 0; i < out_degree; ++i) g.edges.push_back(InputEdge{0, others[i], 1.0});
  std::uniform_int_distribution<VertexId> pick(1, vertices - 1);
  for (VertexId u = 1; u < vertices; ++u) {
    if (feeds_hub[u]) g.edges.push_back(InputEdge{u, 0, 1.0});
    for (std::uint32_t j = 0; j < background_degree; ++j) {
      VertexId t = pick(rng);
      while (t == u) t = pick(rng);
      g.edges.push_back(InputEdge{u, t, 1.0});
    }
  }
  assign_weights(g, seed, weights);
  return g;
}

EdgeList make_graph(const GraphSpec& s) {
  if (!s.path.empty()) return load_edge_list(s.path, s.weights, s.seed).graph;
  if (s.generator == "rmat") return generate_rmat(s.scale, s.edge_factor, s.rmat_a, s.rmat_b, s.rmat_c, s.seed, s.weights);
  if (s.generator == "er") return generate_er(s.n, s.m, s.seed, s.weights);
  if (s.generator == "path") return generate_path(s.n, s.seed, s.weights);
  if (s.generator == "star") return generate_star(s.n, s.seed, s.weights);
  if (s.generator == "hub")
    return generate_hub(s.hub_vertices, s.hub_in_degree, s.hub_background_degree, s.hub_out_degree, s.seed,
                        s.weights);
  throw ConfigError("unknown generator '" + s.generator + "'");
}

GraphProfile profile_graph(const EdgeList& g, std::uint64_t seed) {
  GraphProfile p;
  p.vertices = g.num_vertices;
  p.edges = g.edges.size();
  if (g.num_vertices == 0) return p;
  p.mean_out_degree = static_cast<double>(g.edges.size()) / g.num_vertices;
  for (auto d : g.in_degrees()) p.max_in_degree = std::max(p.max_in_degree, d);
  for (auto d : g.out_degrees()) p.max_out_degree = std::max(p.max_out_degree, d);
  std::vector<VertexId> sources(g.num_vertices);
  std::iota(sources.begin(), sources.end(), VertexId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(sources.begin(), sources.end(), rng);
  sources.resize(std::min<std::size_t>(sources.size(), 100));
  double total = 0.0;
  std::uint64_t pairs = 0;
  for (VertexId s : sources) {
    for (auto l : bfs_oracle(g, s)) {
      if (l == kUnreachedLevel || l == 0) continue;
      total += static_cast<double>(l);
      ++pairs;
    }
  }
  p.mean_sssp_length = pairs ? total / static_cast<double>(pairs) : 0.0;
  return p;
}

namespace {

std::vector<std::vector<std::pair<VertexId, double>>> adjacency(const EdgeList& g) {
  std::vector<std::vector<std::pair<VertexId, double>>> adj(g.num_vertices);
  for (const auto& e : g.edges) adj[e.src].emplace_back(e.dst, e.weight);
  return adj;
}

}  // namespace

std::vector<std::int64_t> bfs_oracle(const EdgeList& g, VertexId source) {
  std::vector<std::int64_t> level(g.num_vertices, kUnreachedLevel);
  if (source >= g.num_vertices) throw ConfigError("source vertex is not in the graph");
  const auto adj = adjacency(g);
  std::queue<VertexId> q;
  level[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop();
    for (const auto& [v, w] : adj[u]) {
      if (level[v] != kUnreachedLevel) continue;
      level[v] = level[u] + 1;
      q.push(v);
    }
  }
  return level;
}

std::vector<double> sssp_oracle(const EdgeList& g, VertexId source) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.num_vertices, inf);
  if (source >= g.num_vertices) throw ConfigError("source vertex is not in the graph");
  const auto adj = adjacency(g);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

std::vector<double> pagerank_oracle(const EdgeList& g, std::uint32_t iterations, double damping) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices);
  if (n == 0) return {};
  const auto out = g.out_degrees();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.edges.size());
  for (const auto& e : g.edges) trips.emplace_back(e.dst, e.src, 1.0 / out[e.src]);
  Eigen::SparseMatrix<double> transition(n, n);
  transition.setFromTriplets(trips.begin(), trips.end());
  const double nd = static_cast<double>(n);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / nd);
  for (std::uint32_t k = 0; k < iterations; ++k) {
    double dangling = 0.0;
    for (Eigen::Index v = 0; v < n; ++v)
      if (out[static_cast<std::size_t>(v)] == 0) dangling += x[v];
    const Eigen::VectorXd spread = transition * x;
    x = ((1.0 - damping) / nd + damping * dangling / nd) * Eigen::VectorXd::Ones(n) + damping * spread;
  }
  return std::vector<double>(x.data(), x.data() + n);
}

Verdict compare_with_oracle(const EdgeList& g, const AppParams& app, const AppResult& result) {
  Verdict v;
  auto fail = [&v](const std::string& why) {
    if (v.pass) v.detail = why;
    v.pass = false;
  };
  switch (app.app) {
    case AppKind::BFS: {
      const auto expect = bfs_oracle(g, app.source);
      for (VertexId i = 0; i < g.num_vertices && v.pass; ++i)
        if (result.level.at(i) != expect[i])
          fail("vertex " + std::to_string(i) + " level " + std::to_string(result.level[i]) + " != " +
               std::to_string(expect[i]));
      break;
    }
    case AppKind::SSSP: {
      const auto expect = sssp_oracle(g, app.source);
      for (VertexId i = 0; i < g.num_vertices && v.pass; ++i)
        if (result.distance.at(i) != expect[i])
          fail("vertex " + std::to_string(i) + " distance " + format_double(result.distance[i]) +
               " != " + format_double(expect[i]));
      break;
    }
    case AppKind::PageRank: {
      const auto expect = pagerank_oracle(g, app.iterations, app.damping);
      double sum = 0.0;
      for (VertexId i = 0; i < g.num_vertices; ++i) {
        sum += result.score.at(i);
        if (std::abs(result.score[i] - expect[i]) > kPageRankTolerance)
          fail("vertex " + std::to_string(i) + " score " + format_double(result.score[i]) + " != " +
               format_double(expect[i]));
      }
      if (g.num_vertices > 0 && std::abs(sum - 1.0) > kPageRankTolerance)
        fail("scores sum to " + format_double(sum));
      break;
    }
  }
  if (v.pass) v.detail = "match";
  return v;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, make_graph(cfg.graph)); }

ExperimentResult run_experiment(const ExperimentConfig& cfg, const EdgeList& graph) {
  cfg.validate();
  ExperimentResult out;
  GraphStore store(cfg.chip);
  out.build = build_graph(store, graph, cfg.structure);
  RuntimeOptions options;
  options.lco_set_charged = cfg.lco_set_charged;
  options.frames_stride = cfg.output.frames_stride;
  Simulator sim(cfg.chip, store, make_registry(cfg.app, store), options);
  germinate(sim, cfg.app);
  sim.run(cfg.output.cycle_cap);
  out.stats = collect(sim);
  out.result = extract_result(store, cfg.app.app);
  out.rhizomes_consistent = rhizomes_consistent(store, cfg.app.app);
  if (cfg.output.verify) {
    out.verdict = compare_with_oracle(graph, cfg.app, out.result);
    if (!out.rhizomes_consistent) {
      out.verdict->pass = false;
      out.verdict->detail = "rhizome members disagree";
    }
  }
  out.frames = sim.frames();
  for (auto& [k, v] : config_entries(cfg))
    if (!is_output_path(k)) out.fields.emplace_back(k, v);
  out.fields.emplace_back("vertices", std::to_string(graph.num_vertices));
  out.fields.emplace_back("edges", std::to_string(graph.edges.size()));
  out.fields.emplace_back("objects", std::to_string(out.build.objects));
  out.fields.emplace_back("rhizome_members", std::to_string(out.build.rhizome_members));
  out.fields.emplace_back("cutoff_chunk", std::to_string(out.build.cutoff_chunk));
  out.fields.emplace_back("verdict", !out.verdict ? "skipped" : out.verdict->pass ? "pass" : "fail");
  for (auto& f : stats_fields(out.stats, cfg.energy)) out.fields.push_back(std::move(f));
  return out;
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, const std::vector<std::string>& axes) {
  std::vector<ExperimentConfig> configs{base};
  for (const auto& axis : axes) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep axis '" + axis + "' is not of the form key=v1,v2");
    const std::string key = axis.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream ss(axis.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
    if (values.empty()) throw ConfigError("sweep axis '" + key + "' has no values");
    std::vector<ExperimentConfig> next;
    for (const auto& c : configs) {
      for (const auto& v : values) {
        ExperimentConfig x = c;
        set_key(x, key, v);
        next.push_back(std::move(x));
      }
    }
    configs = std::move(next);
  }
  return configs;
}

}  // namespace ccasim
