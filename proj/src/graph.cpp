#include "ccasim/graph.hpp"

#include "ccasim/message.hpp"

namespace ccasim {

std::vector<std::uint32_t> EdgeList::out_degrees() const {
  std::vector<std::uint32_t> d(num_vertices, 0);
  for (const auto& e : edges) ++d[e.src];
  return d;
}

std::vector<std::uint32_t> EdgeList::in_degrees() const {
  std::vector<std::uint32_t> d(num_vertices, 0);
  for (const auto& e : edges) ++d[e.dst];
  return d;
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::BFS: return "bfs";
    case ActionKind::SSSP: return "sssp";
    case ActionKind::PageRank: return "pagerank";
    case ActionKind::RhizomeShare: return "rhizome-share";
    case ActionKind::LcoSet: return "lco-set";
    case ActionKind::Germinate: return "germinate";
  }
  return "?";
}

}  // namespace ccasim
