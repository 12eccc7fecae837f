#pragma once

#include <cstdint>
#include <vector>

namespace ccasim {

using VertexId = std::uint32_t;

struct InputEdge {
  VertexId src = 0;
  VertexId dst = 0;
  double weight = 1.0;

  friend bool operator==(const InputEdge&, const InputEdge&) = default;
};

/// Directed multigraph in ingestion order over dense ids [0, num_vertices).
struct EdgeList {
  VertexId num_vertices = 0;
  std::vector<InputEdge> edges;

  std::vector<std::uint32_t> out_degrees() const;
  std::vector<std::uint32_t> in_degrees() const;

  friend bool operator==(const EdgeList&, const EdgeList&) = default;
};

}  // namespace ccasim
