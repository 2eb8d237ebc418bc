#include "mlg/graph.hpp"

#include <algorithm>
#include <sstream>

namespace mlg {

const char* role_name(VertexRole role) {
  switch (role) {
    case VertexRole::Subscriber: return "subscriber";
    case VertexRole::VideoServer: return "video_server";
    case VertexRole::AccessNode: return "access_node";
    case VertexRole::Intermediate: return "intermediate";
    case VertexRole::ServiceHub: return "service_hub";
  }
  return "unknown";
}

std::optional<VertexRole> role_from_name(std::string_view name) {
  if (name == "subscriber") return VertexRole::Subscriber;
  if (name == "video_server") return VertexRole::VideoServer;
  if (name == "access_node") return VertexRole::AccessNode;
  if (name == "intermediate") return VertexRole::Intermediate;
  if (name == "service_hub") return VertexRole::ServiceHub;
  return std::nullopt;
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::DuplicateEntity: return "DuplicateEntity";
    case Errc::EdgeEndpointMissing: return "EdgeEndpointMissing";
    case Errc::NonPositiveCapacity: return "NonPositiveCapacity";
    case Errc::NoSubscribers: return "NoSubscribers";
    case Errc::NoServers: return "NoServers";
    case Errc::NonAdjacentLayer: return "NonAdjacentLayer";
    case Errc::UnknownContent: return "UnknownContent";
    case Errc::UnknownSubscriber: return "UnknownSubscriber";
    case Errc::SourceNotOnLayer1: return "SourceNotOnLayer1";
    case Errc::InvalidPath: return "InvalidPath";
    case Errc::UnmappedEdge: return "UnmappedEdge";
    case Errc::DiscontinuousMapping: return "DiscontinuousMapping";
    case Errc::LoopingExpansion: return "LoopingExpansion";
    case Errc::MissingSuperSource: return "MissingSuperSource";
    case Errc::NoCommodities: return "NoCommodities";
    case Errc::IterationLimitExceeded: return "IterationLimitExceeded";
    case Errc::NodeLimitExceeded: return "NodeLimitExceeded";
    case Errc::TooLargeForOracle: return "TooLargeForOracle";
    case Errc::NotOptimal: return "NotOptimal";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownField: return "UnknownField";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::IoError: return "IoError";
  }
  return "Error";
}

const char* violation_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::RoleOverlap: return "role_overlap";
    case ViolationCode::SubscriberAdjacency: return "subscriber_adjacency";
    case ViolationCode::BrokenStar: return "broken_star";
    case ViolationCode::MissingCounterpart: return "missing_counterpart";
    case ViolationCode::DuplicateCounterpart: return "duplicate_counterpart";
    case ViolationCode::BadCounterpart: return "bad_counterpart";
    case ViolationCode::SelfLoop: return "self_loop";
    case ViolationCode::ParallelEdge: return "parallel_edge";
    case ViolationCode::EdgeEndpointMissing: return "edge_endpoint_missing";
    case ViolationCode::NonPositiveCapacity: return "non_positive_capacity";
    case ViolationCode::CapacityOnLogicalLayer: return "capacity_on_logical_layer";
    case ViolationCode::Disconnected: return "disconnected";
    case ViolationCode::DemandMismatch: return "demand_mismatch";
    case ViolationCode::NodeImbalance: return "node_imbalance";
    case ViolationCode::TransitViolation: return "transit_violation";
    case ViolationCode::Overload: return "overload";
    case ViolationCode::InvalidPath: return "invalid_path";
  }
  return "violation";
}

std::optional<VertexRole> MultiLayerGraph::entity_role(const EntityId& e) const {
  for (int layer_id = kPhysicalLayer; layer_id <= kServiceLayer; ++layer_id) {
    auto it = roles.find(VertexId{e, layer_id});
    if (it != roles.end()) return it->second;
  }
  return std::nullopt;
}

MultiLayerGraph build_graph(const GraphSpec& spec) {
  std::map<EntityId, VertexRole> entity_roles;
  for (const auto& [id, role] : spec.entities) {
    if (!entity_roles.emplace(id, role).second)
      fail(Errc::DuplicateEntity, "entity '" + id + "' listed twice");
  }

  MultiLayerGraph g;
  for (int layer_id = kPhysicalLayer; layer_id <= kServiceLayer; ++layer_id) {
    Layer& layer = g.layer(layer_id);
    layer.id = layer_id;
    for (const EntityId& e : spec.presence[static_cast<std::size_t>(layer_id - 1)]) {
      auto it = entity_roles.find(e);
      if (it == entity_roles.end())
        fail(Errc::EdgeEndpointMissing,
             "layer " + std::to_string(layer_id) + " lists unknown entity '" + e + "'");
      layer.vertices.insert(e);
      g.roles[VertexId{e, layer_id}] = it->second;
    }
    for (const LayerEdge& raw : spec.edges[static_cast<std::size_t>(layer_id - 1)]) {
      LayerEdge e = LayerEdge::make(raw.a, raw.b, raw.capacity, raw.weight);
      for (const EntityId* end : {&e.a, &e.b}) {
        if (!layer.has_vertex(*end))
          fail(Errc::EdgeEndpointMissing,
               "edge (" + e.a + "," + e.b + ") on layer " + std::to_string(layer_id) +
                   " names absent vertex '" + *end + "'");
      }
      if (layer_id == kPhysicalLayer) {
        if (!e.capacity.has_value() || !(*e.capacity > 0.0))
          fail(Errc::NonPositiveCapacity,
               "physical link (" + e.a + "," + e.b + ") needs a positive capacity");
      }
      layer.edges.push_back(std::move(e));
    }
  }

  // One counterpart edge per entity per adjacent layer pair.
  for (const auto& [id, role] : spec.entities) {
    (void)role;
    for (int lower = kPhysicalLayer; lower < kServiceLayer; ++lower) {
      if (g.layer(lower).has_vertex(id) && g.layer(lower + 1).has_vertex(id)) {
        g.counterparts.push_back(
            CounterpartEdge{VertexId{id, lower}, VertexId{id, lower + 1}});
      }
    }
  }
  std::sort(g.counterparts.begin(), g.counterparts.end());
  return g;
}

std::pair<Layer, Layer> generate_logical_layers(
    const Layer& physical, const std::map<EntityId, VertexRole>& roles) {
  std::vector<EntityId> subscribers;
  std::vector<EntityId> servers;
  for (const EntityId& e : physical.vertices) {
    auto it = roles.find(e);
    if (it == roles.end()) continue;
    if (it->second == VertexRole::Subscriber) subscribers.push_back(e);
    if (it->second == VertexRole::VideoServer) servers.push_back(e);
  }
  if (subscribers.empty()) fail(Errc::NoSubscribers, "physical layer has no subscribers");
  if (servers.empty()) fail(Errc::NoServers, "physical layer has no video servers");

  Layer logical;
  logical.id = kLogicalLayer;
  for (const EntityId& e : subscribers) logical.vertices.insert(e);
  for (const EntityId& e : servers) logical.vertices.insert(e);
  for (std::size_t i = 0; i < servers.size(); ++i)
    for (std::size_t j = i + 1; j < servers.size(); ++j)
      logical.edges.push_back(LayerEdge::make(servers[i], servers[j]));
  for (const EntityId& sub : subscribers)
    for (const EntityId& srv : servers)
      logical.edges.push_back(LayerEdge::make(sub, srv));

  Layer service;
  service.id = kServiceLayer;
  service.vertices.insert(kHubEntity);
  for (const EntityId& sub : subscribers) {
    service.vertices.insert(sub);
    service.edges.push_back(LayerEdge::make(kHubEntity, sub));
  }
  return {std::move(logical), std::move(service)};
}

GraphSpec canonical_graph_spec(
    const std::vector<std::pair<EntityId, VertexRole>>& entities,
    const std::vector<LayerEdge>& physical_links) {
  GraphSpec spec;
  spec.entities = entities;

  Layer physical;
  physical.id = kPhysicalLayer;
  std::map<EntityId, VertexRole> roles;
  for (const auto& [id, role] : entities) {
    physical.vertices.insert(id);
    roles[id] = role;
    spec.presence[0].push_back(id);
  }
  spec.edges[0] = physical_links;

  auto [logical, service] = generate_logical_layers(physical, roles);
  spec.presence[1].assign(logical.vertices.begin(), logical.vertices.end());
  spec.edges[1] = logical.edges;
  spec.presence[2].assign(service.vertices.begin(), service.vertices.end());
  spec.edges[2] = service.edges;
  spec.entities.emplace_back(kHubEntity, VertexRole::ServiceHub);
  return spec;
}

namespace {

std::string edge_str(int layer, const LayerEdge& e) {
  return "layer " + std::to_string(layer) + " edge (" + e.a + "," + e.b + ")";
}

void check_layer_wellformed(const Layer& layer, ValidationReport& report) {
  std::set<std::pair<EntityId, EntityId>> seen;
  for (const LayerEdge& e : layer.edges) {
    if (e.a == e.b) {
      report.add(ViolationCode::SelfLoop, edge_str(layer.id, e));
      continue;
    }
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert(key).second)
      report.add(ViolationCode::ParallelEdge, edge_str(layer.id, e));
    for (const EntityId* end : {&e.a, &e.b}) {
      if (!layer.has_vertex(*end))
        report.add(ViolationCode::EdgeEndpointMissing,
                   edge_str(layer.id, e) + " names absent vertex '" + *end + "'");
    }
    if (layer.id == kPhysicalLayer) {
      if (!e.capacity.has_value() || !(*e.capacity > 0.0))
        report.add(ViolationCode::NonPositiveCapacity, edge_str(layer.id, e));
    } else if (e.capacity.has_value()) {
      report.add(ViolationCode::CapacityOnLogicalLayer, edge_str(layer.id, e));
    }
  }
}

void check_connectivity(const Layer& layer, ValidationReport& report) {
  if (layer.vertices.empty()) return;
  std::set<EntityId> visited;
  std::vector<EntityId> stack{*layer.vertices.begin()};
  visited.insert(stack.back());
  while (!stack.empty()) {
    EntityId v = stack.back();
    stack.pop_back();
    for (const LayerEdge& e : layer.edges) {
      if (e.a != v && e.b != v) continue;
      const EntityId& other = (e.a == v) ? e.b : e.a;
      if (layer.has_vertex(other) && visited.insert(other).second)
        stack.push_back(other);
    }
  }
  if (visited.size() != layer.vertices.size()) {
    std::ostringstream os;
    os << "layer 1 splits into components; unreached:";
    for (const EntityId& v : layer.vertices)
      if (!visited.count(v)) os << " " << v;
    report.add(ViolationCode::Disconnected, os.str());
  }
}

}  // namespace

ValidationReport validate_structure(const MultiLayerGraph& g) {
  ValidationReport report;

  for (int layer_id = kPhysicalLayer; layer_id <= kServiceLayer; ++layer_id)
    check_layer_wellformed(g.layer(layer_id), report);

  // Role disjointness: all replicas of one entity carry the same role, and
  // the hub role appears only on layer 3, at most once.
  std::map<EntityId, std::set<VertexRole>> roles_by_entity;
  for (const auto& [vertex, role] : g.roles)
    roles_by_entity[vertex.entity].insert(role);
  for (const auto& [entity, role_set] : roles_by_entity) {
    if (role_set.size() > 1) {
      std::ostringstream os;
      os << "entity '" << entity << "' carries roles:";
      for (VertexRole r : role_set) os << " " << role_name(r);
      report.add(ViolationCode::RoleOverlap, os.str());
    }
  }
  std::vector<EntityId> hubs;
  for (const auto& [vertex, role] : g.roles) {
    if (role != VertexRole::ServiceHub) continue;
    if (vertex.layer != kServiceLayer)
      report.add(ViolationCode::BrokenStar,
                 "service hub '" + vertex.entity + "' replicated on layer " +
                     std::to_string(vertex.layer));
    else
      hubs.push_back(vertex.entity);
  }
  std::sort(hubs.begin(), hubs.end());
  hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
  if (hubs.size() > 1)
    report.add(ViolationCode::BrokenStar,
               "more than one service hub: " + std::to_string(hubs.size()));

  // Layer 2: subscribers never adjacent to each other.
  const Layer& logical = g.layer(kLogicalLayer);
  auto role_on = [&g](const EntityId& e, int layer_id) {
    return g.role_of(VertexId{e, layer_id});
  };
  for (const LayerEdge& e : logical.edges) {
    if (role_on(e.a, kLogicalLayer) == VertexRole::Subscriber &&
        role_on(e.b, kLogicalLayer) == VertexRole::Subscriber)
      report.add(ViolationCode::SubscriberAdjacency, edge_str(kLogicalLayer, e));
  }

  // Layer 3: a star centered on the hub, one edge per subscriber replica.
  const Layer& service = g.layer(kServiceLayer);
  const EntityId hub = hubs.empty() ? EntityId{} : hubs.front();
  std::map<EntityId, int> star_degree;
  for (const LayerEdge& e : service.edges) {
    if (e.a == e.b) continue;  // reported as SelfLoop above
    bool a_is_hub = !hub.empty() && e.a == hub;
    bool b_is_hub = !hub.empty() && e.b == hub;
    if (a_is_hub == b_is_hub) {
      report.add(ViolationCode::BrokenStar,
                 edge_str(kServiceLayer, e) + " does not join hub and subscriber");
      continue;
    }
    const EntityId& leaf = a_is_hub ? e.b : e.a;
    if (role_on(leaf, kServiceLayer) != VertexRole::Subscriber)
      report.add(ViolationCode::BrokenStar,
                 edge_str(kServiceLayer, e) + " leaf '" + leaf + "' is not a subscriber");
    star_degree[leaf] += 1;
  }
  for (const EntityId& v : service.vertices) {
    if (role_on(v, kServiceLayer) != VertexRole::Subscriber) continue;
    int deg = star_degree.count(v) ? star_degree[v] : 0;
    if (deg != 1)
      report.add(ViolationCode::BrokenStar,
                 "subscriber '" + v + "' has " + std::to_string(deg) +
                     " service edges, expected 1");
  }
  if (hub.empty() && !service.edges.empty())
    report.add(ViolationCode::BrokenStar, "service layer has edges but no hub");

  // Counterpart exactness: one edge per entity per adjacent layer pair where
  // both replicas exist; endpoints must denote the same entity on adjacent
  // layers.
  std::map<std::pair<EntityId, int>, int> counterpart_count;
  for (const CounterpartEdge& c : g.counterparts) {
    if (c.upper.layer != c.lower.layer + 1 || !is_layer_id(c.lower.layer) ||
        !is_layer_id(c.upper.layer)) {
      report.add(ViolationCode::BadCounterpart,
                 "counterpart (" + c.lower.entity + " L" + std::to_string(c.lower.layer) +
                     ", " + c.upper.entity + " L" + std::to_string(c.upper.layer) +
                     ") does not join adjacent layers");
      continue;
    }
    if (c.lower.entity != c.upper.entity) {
      report.add(ViolationCode::BadCounterpart,
                 "counterpart joins different entities '" + c.lower.entity + "' and '" +
                     c.upper.entity + "'");
      continue;
    }
    if (!g.has_vertex(c.lower) || !g.has_vertex(c.upper)) {
      report.add(ViolationCode::BadCounterpart,
                 "counterpart of '" + c.lower.entity + "' names an absent replica");
      continue;
    }
    counterpart_count[{c.lower.entity, c.lower.layer}] += 1;
  }
  std::set<EntityId> all_entities;
  for (const auto& [vertex, role] : g.roles) {
    (void)role;
    all_entities.insert(vertex.entity);
  }
  for (const EntityId& e : all_entities) {
    for (int lower = kPhysicalLayer; lower < kServiceLayer; ++lower) {
      bool both = g.layer(lower).has_vertex(e) && g.layer(lower + 1).has_vertex(e);
      int n = counterpart_count.count({e, lower}) ? counterpart_count[{e, lower}] : 0;
      if (both && n == 0)
        report.add(ViolationCode::MissingCounterpart,
                   "entity '" + e + "' lacks its counterpart edge between layers " +
                       std::to_string(lower) + " and " + std::to_string(lower + 1));
      if (n > 1)
        report.add(ViolationCode::DuplicateCounterpart,
                   "entity '" + e + "' has " + std::to_string(n) +
                       " counterpart edges between layers " + std::to_string(lower) +
                       " and " + std::to_string(lower + 1));
      if (!both && n > 0)
        report.add(ViolationCode::BadCounterpart,
                   "entity '" + e + "' has a counterpart edge between layers " +
                       std::to_string(lower) + " and " + std::to_string(lower + 1) +
                       " without both replicas");
    }
  }

  check_connectivity(g.layer(kPhysicalLayer), report);

  report.normalize();
  return report;
}

std::optional<VertexId> counterpart(const MultiLayerGraph& g, const VertexId& v,
                                    int target_layer) {
  if (!is_layer_id(target_layer) || std::abs(target_layer - v.layer) != 1)
    fail(Errc::NonAdjacentLayer,
         "layer " + std::to_string(target_layer) + " is not adjacent to layer " +
             std::to_string(v.layer));
  VertexId replica{v.entity, target_layer};
  if (!g.has_vertex(replica)) return std::nullopt;
  return replica;
}

}  // namespace mlg
