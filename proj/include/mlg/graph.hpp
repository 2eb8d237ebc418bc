#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mlg/common.hpp"
#include "mlg/validation.hpp"

namespace mlg {

// Undirected intra-layer edge. Endpoints are stored in sorted order.
// Physical (layer 1) edges carry a finite positive capacity and an optional
// cost weight; logical edges carry neither.
struct LayerEdge {
  EntityId a;
  EntityId b;
  std::optional<double> capacity;
  std::optional<double> weight;

  static LayerEdge make(EntityId u, EntityId v,
                        std::optional<double> capacity = std::nullopt,
                        std::optional<double> weight = std::nullopt) {
    if (v < u) std::swap(u, v);
    return LayerEdge{std::move(u), std::move(v), capacity, weight};
  }

  bool connects(const EntityId& u, const EntityId& v) const {
    return (a == u && b == v) || (a == v && b == u);
  }
};

// Directed zero-weight arc from a commodity's super source to one of its
// candidate servers. Kept apart from the undirected edge set: it has no
// capacity, no installation decision, and exists in one direction only.
struct SuperSourceArc {
  EntityId from;
  EntityId to;
  int commodity = -1;
};

struct Layer {
  int id = kPhysicalLayer;
  std::set<EntityId> vertices;
  std::vector<LayerEdge> edges;
  std::vector<SuperSourceArc> super_arcs;

  bool has_vertex(const EntityId& e) const { return vertices.count(e) > 0; }

  const LayerEdge* find_edge(const EntityId& u, const EntityId& v) const {
    for (const auto& e : edges)
      if (e.connects(u, v)) return &e;
    return nullptr;
  }

  bool has_super_arc(const EntityId& from, const EntityId& to) const {
    for (const auto& s : super_arcs)
      if (s.from == from && s.to == to) return true;
    return false;
  }
};

// Inter-layer edge joining the two replicas of one functional unit on
// adjacent layers.
struct CounterpartEdge {
  VertexId lower;
  VertexId upper;

  bool operator<(const CounterpartEdge& o) const {
    if (lower != o.lower) return lower < o.lower;
    return upper < o.upper;
  }
  bool operator==(const CounterpartEdge&) const = default;
};

struct MultiLayerGraph {
  std::array<Layer, 3> layers_;              // index 0..2 holds layer 1..3
  std::map<VertexId, VertexRole> roles;      // per replica
  std::vector<CounterpartEdge> counterparts;

  Layer& layer(int id) { return layers_.at(static_cast<std::size_t>(id - 1)); }
  const Layer& layer(int id) const {
    return layers_.at(static_cast<std::size_t>(id - 1));
  }

  // Entity map: a vertex is the per-layer replica of an entity.
  const EntityId& entity(const VertexId& v) const { return v.entity; }

  bool has_vertex(const VertexId& v) const {
    return is_layer_id(v.layer) && layer(v.layer).has_vertex(v.entity);
  }

  std::optional<VertexRole> role_of(const VertexId& v) const {
    auto it = roles.find(v);
    if (it == roles.end()) return std::nullopt;
    return it->second;
  }

  // Role of an entity as declared on the physical layer, falling back to any
  // replica. Used where a per-entity view is wanted.
  std::optional<VertexRole> entity_role(const EntityId& e) const;
};

// Input description consumed by build_graph: entities with roles, per-layer
// presence, and per-layer edges.
struct GraphSpec {
  std::vector<std::pair<EntityId, VertexRole>> entities;
  std::array<std::vector<EntityId>, 3> presence;  // index 0..2 → layer 1..3
  std::array<std::vector<LayerEdge>, 3> edges;
};

// Materializes layers, per-replica roles, and one counterpart edge per entity
// per adjacent layer pair.
// Throws: DuplicateEntity, EdgeEndpointMissing, NonPositiveCapacity.
MultiLayerGraph build_graph(const GraphSpec& spec);

// Canonical logical layers on top of a physical layer: the almost-mesh
// server/subscriber layer (all server-server and subscriber-server pairs,
// never subscriber-subscriber) and the service star (one hub vertex joined
// to every subscriber).
// Throws: NoSubscribers, NoServers.
std::pair<Layer, Layer> generate_logical_layers(
    const Layer& physical, const std::map<EntityId, VertexRole>& roles);

// Convenience: assemble the full three-layer GraphSpec from entities and
// physical links, generating layers 2 and 3 canonically.
GraphSpec canonical_graph_spec(
    const std::vector<std::pair<EntityId, VertexRole>>& entities,
    const std::vector<LayerEdge>& physical_links);

// Checks every structural invariant and reports all violations found.
ValidationReport validate_structure(const MultiLayerGraph& g);

// The replica of v's entity on an adjacent layer, or nullopt when the entity
// is not replicated there.
// Throws: NonAdjacentLayer.
std::optional<VertexId> counterpart(const MultiLayerGraph& g, const VertexId& v,
                                    int target_layer);

}  // namespace mlg
