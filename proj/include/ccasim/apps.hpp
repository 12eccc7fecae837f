#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ccasim/graph_store.hpp"
#include "ccasim/runtime.hpp"

namespace ccasim {

enum class AppKind : std::uint8_t { BFS, SSSP, PageRank };

std::string_view to_string(AppKind a);
AppKind parse_app(std::string_view text);

struct AppParams {
  AppKind app = AppKind::BFS;
  VertexId source = 0;
  std::uint32_t iterations = 30;  // PageRank K
  double damping = 0.85;
};

inline constexpr std::uint32_t kPageRankCostCap = 70;

/// Handler triplets for one application over a built store.
ActionRegistry make_registry(const AppParams& params, const GraphStore& store);

/// Injects the initial actions (source rhizome for BFS/SSSP, every member
/// for PageRank) and configures the global reduction.
void germinate(Simulator& sim, const AppParams& params);

struct AppResult {
  std::vector<std::int64_t> level;
  std::vector<double> distance;
  std::vector<double> score;
};

/// Labels read from each vertex's first rhizome member.
AppResult extract_result(const GraphStore& store, AppKind app);

/// Every member of every rhizome holds the same label for `app`.
bool rhizomes_consistent(const GraphStore& store, AppKind app);

}  // namespace ccasim
