#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "ccasim/geometry.hpp"
#include "ccasim/graph.hpp"
#include "ccasim/lco.hpp"
#include "ccasim/message.hpp"

namespace ccasim {

struct Edge {
  Address target;  // root of the destination vertex's assigned rhizome member
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Application state held on root objects. Ghosts carry the record but no
/// predicate ever consults it.
struct AppSlots {
  std::int64_t level = kUnreachedLevel;
  double distance = std::numeric_limits<double>::infinity();
  double score = 0.0;
  std::uint32_t iteration = 0;
  std::uint32_t local_in_degree = 0;
  // PageRank gates keyed by iteration; neighbours may run one iteration ahead.
  std::map<std::uint32_t, AndGateLCO<double>> msg_count;
  std::map<std::uint32_t, AndGateLCO<double>> score_gate;
  // Collapsed totals waiting for this member to reach their iteration.
  std::map<std::uint32_t, double> collapsed;
  bool trigger_outstanding = false;
};

/// Root or ghost node of a recursively parallel vertex object.
struct VertexObject {
  VertexId vertex_id = 0;
  bool is_root = true;
  std::vector<Edge> local_edges;
  std::vector<Address> ghost_links;
  std::vector<Address> rhizome_links;  // sibling roots; empty on ghosts
  std::optional<Address> parent;       // set on ghosts
  std::uint16_t rank = 0;              // member index within the rhizome
  std::uint16_t rhizome_size = 1;
  std::uint32_t out_degree = 0;        // whole-vertex out-degree
  std::uint32_t subtree_edges = 0;
  std::uint32_t subtree_objects = 1;
  AppSlots app;
};

struct RhizomeDescriptor {
  VertexId vertex_id = 0;
  std::vector<Address> members;
  std::uint32_t cutoff_chunk = 1;
  std::uint32_t rpvo_max = 1;
  std::uint64_t in_edge_assignment_cursor = 0;
  std::uint32_t current = 0;     // member receiving the current block
  std::uint32_t block_fill = 0;  // assignments made into the current block
};

enum class AllocatorMode : std::uint8_t { Random, Vicinity, Mixed };

std::string_view to_string(AllocatorMode m);
AllocatorMode parse_allocator_mode(std::string_view text);

struct AllocatorPolicy {
  AllocatorMode mode = AllocatorMode::Mixed;
  std::int32_t vicinity_radius = 2;
};

/// Seeded cell chooser implementing the Random / Vicinity / Mixed policies.
class Allocator {
 public:
  Allocator(AllocatorPolicy policy, const ChipConfig& chip);

  const AllocatorPolicy& policy() const { return policy_; }

  Coordinate random_cell();
  /// Uniform over cells within Chebyshev `vicinity_radius` of `hint`
  /// (clipped on a mesh, wrapped on a torus).
  Coordinate vicinity_cell(Coordinate hint);
  Coordinate root_cell(std::optional<Coordinate> hint);
  Coordinate ghost_cell(Coordinate holder);

 private:
  AllocatorPolicy policy_;
  ChipConfig chip_;
  std::mt19937_64 rng_;
};

struct StructureParams {
  std::uint32_t rpvo_max = 1;
  std::uint32_t local_edge_list_size = 8;
  std::uint32_t ghost_children = 2;  // g
  AllocatorPolicy allocator;
  bool rhizomes_enabled = true;

  void validate() const;
};

/// Object tables of every cell plus the vertex directory.
class GraphStore {
 public:
  explicit GraphStore(const ChipConfig& chip);

  const ChipConfig& chip() const { return chip_; }

  Address allocate(Coordinate cell, VertexObject object);
  VertexObject& at(Address a);
  const VertexObject& at(Address a) const;
  /// True when `a` names a live object.
  bool resolves(Address a) const;

  std::vector<VertexObject>& objects_at(CellId cell) { return cells_[cell]; }
  const std::vector<VertexObject>& objects_at(CellId cell) const { return cells_[cell]; }
  std::size_t object_count() const;

  VertexId vertex_count() const { return static_cast<VertexId>(rhizomes_.size()); }
  const std::vector<Address>& members(VertexId v) const { return rhizomes_.at(v).members; }
  const RhizomeDescriptor& rhizome(VertexId v) const { return rhizomes_.at(v); }
  std::vector<RhizomeDescriptor>& rhizomes() { return rhizomes_; }
  const std::vector<RhizomeDescriptor>& rhizomes() const { return rhizomes_; }

  std::uint32_t indegree_max() const { return indegree_max_; }
  std::uint32_t cutoff_chunk() const { return cutoff_chunk_; }
  void set_build_summary(std::uint32_t indegree_max, std::uint32_t cutoff) {
    indegree_max_ = indegree_max;
    cutoff_chunk_ = cutoff;
  }

  /// Every object reachable from `root` through ghost links, root first.
  std::vector<Address> rpvo_tree(Address root) const;

 private:
  ChipConfig chip_;
  std::vector<std::vector<VertexObject>> cells_;
  std::vector<RhizomeDescriptor> rhizomes_;
  std::uint32_t indegree_max_ = 0;
  std::uint32_t cutoff_chunk_ = 1;
};

/// max(1, floor(indegree_max / rpvo_max)).
std::uint32_t compute_cutoff_chunk(std::uint32_t indegree_max, std::uint32_t rpvo_max);

Address allocate_root(GraphStore& store, Allocator& alloc, VertexObject root,
                      std::optional<Coordinate> hint);

/// Places `edge` in the RPVO rooted at `vertex_root`, growing ghosts when the
/// reachable objects are full.
void insert_edge(GraphStore& store, Address vertex_root, const Edge& edge, Allocator& alloc,
                 const StructureParams& params);

/// Member that the next in-edge of the rhizome's vertex must point to.
Address assign_in_edge(GraphStore& store, RhizomeDescriptor& rz, Allocator& alloc);

struct BuildReport {
  std::uint32_t indegree_max = 0;
  std::uint32_t cutoff_chunk = 1;
  std::size_t objects = 0;
  std::size_t ghosts = 0;
  std::size_t rhizome_members = 0;
};

/// Two-pass construction: in-degree scan, then root allocation, in-edge
/// assignment and out-edge insertion. Not charged simulation cycles.
BuildReport build_graph(GraphStore& store, const EdgeList& graph, const StructureParams& params);

}  // namespace ccasim
