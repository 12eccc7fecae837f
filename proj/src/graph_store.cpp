#include "ccasim/graph_store.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

namespace ccasim {

std::string_view to_string(AllocatorMode m) {
  switch (m) {
    case AllocatorMode::Random: return "random";
    case AllocatorMode::Vicinity: return "vicinity";
    case AllocatorMode::Mixed: return "mixed";
  }
  return "?";
}

AllocatorMode parse_allocator_mode(std::string_view text) {
  if (text == "random" || text == "Random") return AllocatorMode::Random;
  if (text == "vicinity" || text == "Vicinity") return AllocatorMode::Vicinity;
  if (text == "mixed" || text == "Mixed") return AllocatorMode::Mixed;
  throw ConfigError("unknown allocator mode '" + std::string(text) + "'");
}

Allocator::Allocator(AllocatorPolicy policy, const ChipConfig& chip)
    : policy_(policy), chip_(chip), rng_(chip.rng_seed) {}

Coordinate Allocator::random_cell() {
  std::uniform_int_distribution<CellId> pick(0, chip_.cell_count() - 1);
  return chip_.coord_of(pick(rng_));
}

Coordinate Allocator::vicinity_cell(Coordinate hint) {
  const std::int32_t r = policy_.vicinity_radius;
  std::set<Coordinate> candidates;
  for (std::int32_t dy = -r; dy <= r; ++dy) {
    for (std::int32_t dx = -r; dx <= r; ++dx) {
      Coordinate c{hint.x + dx, hint.y + dy};
      if (chip_.torus()) {
        c.x = ((c.x % chip_.dim_x) + chip_.dim_x) % chip_.dim_x;
        c.y = ((c.y % chip_.dim_y) + chip_.dim_y) % chip_.dim_y;
      } else if (!chip_.contains(c)) {
        continue;
      }
      candidates.insert(c);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return *std::next(candidates.begin(), static_cast<std::ptrdiff_t>(pick(rng_)));
}

Coordinate Allocator::root_cell(std::optional<Coordinate> hint) {
  if (policy_.mode == AllocatorMode::Vicinity && hint) return vicinity_cell(*hint);
  return random_cell();
}

Coordinate Allocator::ghost_cell(Coordinate holder) {
  if (policy_.mode == AllocatorMode::Random) return random_cell();
  return vicinity_cell(holder);
}

void StructureParams::validate() const {
  if (rpvo_max < 1) throw ConfigError("rpvo_max must be at least 1");
  if (rpvo_max > 65535) throw ConfigError("rpvo_max must fit 16 bits");
  if (local_edge_list_size < 1) throw ConfigError("local_edge_list_size must be at least 1");
  if (ghost_children < 1) throw ConfigError("ghost_children must be at least 1");
  if (allocator.vicinity_radius < 1) throw ConfigError("vicinity_radius must be at least 1");
}

GraphStore::GraphStore(const ChipConfig& chip) : chip_(chip), cells_(chip.cell_count()) {}

Address GraphStore::allocate(Coordinate cell, VertexObject object) {
  auto& table = cells_.at(chip_.id_of(cell));
  table.push_back(std::move(object));
  return Address{cell, static_cast<std::uint32_t>(table.size() - 1)};
}

VertexObject& GraphStore::at(Address a) {
  if (!resolves(a)) throw std::out_of_range("dangling object address");
  return cells_[chip_.id_of(a.cell)][a.slot];
}

const VertexObject& GraphStore::at(Address a) const {
  if (!resolves(a)) throw std::out_of_range("dangling object address");
  return cells_[chip_.id_of(a.cell)][a.slot];
}

bool GraphStore::resolves(Address a) const {
  return chip_.contains(a.cell) && a.slot < cells_[chip_.id_of(a.cell)].size();
}

std::size_t GraphStore::object_count() const {
  std::size_t n = 0;
  for (const auto& c : cells_) n += c.size();
  return n;
}

std::vector<Address> GraphStore::rpvo_tree(Address root) const {
  std::vector<Address> out{root};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const Address& g : at(out[i]).ghost_links) out.push_back(g);
  return out;
}

std::uint32_t compute_cutoff_chunk(std::uint32_t indegree_max, std::uint32_t rpvo_max) {
  if (rpvo_max == 0) throw ConfigError("rpvo_max must be at least 1");
  return std::max<std::uint32_t>(1, indegree_max / rpvo_max);
}

Address allocate_root(GraphStore& store, Allocator& alloc, VertexObject root,
                      std::optional<Coordinate> hint) {
  root.is_root = true;
  return store.allocate(alloc.root_cell(hint), std::move(root));
}

namespace {

bool has_room(const VertexObject& o, const StructureParams& p) {
  return o.local_edges.size() < p.local_edge_list_size;
}

bool subtree_has_room(const VertexObject& o, const StructureParams& p) {
  return o.subtree_edges < o.subtree_objects * p.local_edge_list_size;
}

// Least-loaded child, optionally restricted to subtrees with spare room.
std::optional<Address> pick_child(const GraphStore& store, const VertexObject& node,
                                  const StructureParams& p, bool need_room) {
  std::optional<Address> best;
  std::uint32_t best_load = 0;
  for (const Address& c : node.ghost_links) {
    const VertexObject& child = store.at(c);
    if (need_room && !subtree_has_room(child, p)) continue;
    if (!best || child.subtree_edges < best_load) {
      best = c;
      best_load = child.subtree_edges;
    }
  }
  return best;
}

}  // namespace

void insert_edge(GraphStore& store, Address vertex_root, const Edge& edge, Allocator& alloc,
                 const StructureParams& params) {
  std::vector<Address> path{vertex_root};
  Address node = vertex_root;
  for (;;) {
    const VertexObject& cur = store.at(node);
    if (has_room(cur, params)) break;
    if (auto child = pick_child(store, cur, params, true)) {
      node = *child;
      path.push_back(node);
      continue;
    }
    if (cur.ghost_links.size() < params.ghost_children) {
      VertexObject ghost;
      ghost.vertex_id = cur.vertex_id;
      ghost.is_root = false;
      ghost.parent = node;
      ghost.rank = cur.rank;
      ghost.out_degree = cur.out_degree;
      const Address g = store.allocate(alloc.ghost_cell(node.cell), std::move(ghost));
      store.at(node).ghost_links.push_back(g);
      for (const Address& a : path) ++store.at(a).subtree_objects;
      node = g;
      path.push_back(node);
      break;
    }
    node = *pick_child(store, cur, params, false);
    path.push_back(node);
  }
  store.at(node).local_edges.push_back(edge);
  for (const Address& a : path) ++store.at(a).subtree_edges;
}

Address assign_in_edge(GraphStore& store, RhizomeDescriptor& rz, Allocator& alloc) {
  if (rz.members.empty()) throw std::logic_error("rhizome has no root member");
  if (rz.block_fill == rz.cutoff_chunk) {
    rz.block_fill = 0;
    if (rz.members.size() < rz.rpvo_max) {
      const Address first = rz.members.front();
      VertexObject member = store.at(first);
      member.local_edges.clear();
      member.ghost_links.clear();
      member.rhizome_links = rz.members;
      member.rank = static_cast<std::uint16_t>(rz.members.size());
      member.subtree_edges = 0;
      member.subtree_objects = 1;
      member.app = AppSlots{};
      const std::optional<Coordinate> hint =
          alloc.policy().mode == AllocatorMode::Vicinity ? std::optional(first.cell) : std::nullopt;
      const Address added = allocate_root(store, alloc, std::move(member), hint);
      for (const Address& m : rz.members) store.at(m).rhizome_links.push_back(added);
      rz.members.push_back(added);
      const auto size = static_cast<std::uint16_t>(rz.members.size());
      for (const Address& m : rz.members) store.at(m).rhizome_size = size;
      rz.current = static_cast<std::uint32_t>(rz.members.size() - 1);
    } else {
      rz.current = (rz.current + 1) % static_cast<std::uint32_t>(rz.members.size());
    }
  }
  ++rz.block_fill;
  ++rz.in_edge_assignment_cursor;
  const Address target = rz.members[rz.current];
  ++store.at(target).app.local_in_degree;
  return target;
}

BuildReport build_graph(GraphStore& store, const EdgeList& graph, const StructureParams& params) {
  params.validate();
  const auto in = graph.in_degrees();
  const auto out = graph.out_degrees();
  BuildReport report;
  for (auto d : in) report.indegree_max = std::max(report.indegree_max, d);
  const std::uint32_t rpvo_max = params.rhizomes_enabled ? params.rpvo_max : 1;
  report.cutoff_chunk = params.rhizomes_enabled
                            ? compute_cutoff_chunk(std::max<std::uint32_t>(1, report.indegree_max),
                                                   rpvo_max)
                            : std::max<std::uint32_t>(1, report.indegree_max);
  store.set_build_summary(report.indegree_max, report.cutoff_chunk);

  Allocator alloc(params.allocator, store.chip());
  auto& rhizomes = store.rhizomes();
  rhizomes.assign(graph.num_vertices, RhizomeDescriptor{});
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    VertexObject root;
    root.vertex_id = v;
    root.out_degree = out[v];
    RhizomeDescriptor& rz = rhizomes[v];
    rz.vertex_id = v;
    rz.cutoff_chunk = report.cutoff_chunk;
    rz.rpvo_max = rpvo_max;
    rz.members.push_back(allocate_root(store, alloc, std::move(root), std::nullopt));
  }

  std::vector<Address> target(graph.edges.size());
  for (std::size_t i = 0; i < graph.edges.size(); ++i)
    target[i] = assign_in_edge(store, rhizomes[graph.edges[i].dst], alloc);

  std::vector<std::uint32_t> seen(graph.num_vertices, 0);
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const InputEdge& e = graph.edges[i];
    const auto& members = rhizomes[e.src].members;
    const Address root = members[seen[e.src]++ % members.size()];
    insert_edge(store, root, Edge{target[i], e.weight}, alloc, params);
  }

  report.objects = store.object_count();
  for (const auto& rz : rhizomes) report.rhizome_members += rz.members.size();
  report.ghosts = report.objects - report.rhizome_members;
  return report;
}

}  // namespace ccasim
