#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mlg/common.hpp"
#include "mlg/demand.hpp"
#include "mlg/graph.hpp"
#include "mlg/validation.hpp"

namespace mlg {

// Absolute tolerance for every conservation check.
inline constexpr double kFlowTol = 1e-6;

// Directed arc between two vertices of one layer.
using Arc = std::pair<EntityId, EntityId>;
using ArcFlowMap = std::map<Arc, double>;

struct PathFlow {
  int commodity = -1;
  std::vector<EntityId> path;  // ordered vertices on one layer
  double amount = 0.0;         // >= 0
};

struct FlowAssignment {
  std::vector<PathFlow> path_flows;
  ArcFlowMap link_flows;  // arc-wise aggregation of path_flows

  static FlowAssignment from_paths(const Layer& layer,
                                   std::vector<PathFlow> paths);
};

// Overlay mapping: each logical-layer edge materializes as a physical path
// whose endpoints are the counterparts of the edge's endpoints.
using RouteMapping = std::map<Arc, std::vector<EntityId>>;

// Arc-wise sum of path flows: every arc of a path carries the full path
// amount. Throws InvalidPath on non-simple paths, non-adjacent steps, or
// negative amounts.
ArcFlowMap aggregate(const Layer& layer, const std::vector<PathFlow>& path_flows);

// Like aggregate, split per commodity id.
std::map<int, ArcFlowMap> aggregate_by_commodity(
    const Layer& layer, const std::vector<PathFlow>& path_flows);

// Conservation statement 2: per commodity, path amounts sum to the demand
// volume, and the same total reaches the destination.
ValidationReport check_demand_satisfaction(const FlowAssignment& assignment,
                                           const std::vector<Commodity>& commodities);

// Conservation statement 3: per commodity and node, net outflow is +volume
// at the (super-)source, -volume at the destination, zero elsewhere. When a
// commodity is routed without a super source, the surplus may spread over
// its candidate servers but must total +volume.
ValidationReport check_node_balance(const std::map<int, ArcFlowMap>& commodity_flows,
                                    const std::vector<Commodity>& commodities);

// Subscribers never transit or originate traffic: for every subscriber node,
// outgoing flow is zero for all commodities and incoming flow is zero for
// every commodity not destined there.
ValidationReport check_transit_restrictions(
    const std::map<int, ArcFlowMap>& commodity_flows,
    const std::map<EntityId, VertexRole>& roles,
    const std::vector<Commodity>& commodities);

// Expands a logical-layer route into the concatenation of mapped physical
// segments joined at counterpart vertices. Loops arising at junctions are an
// error, not silently removed.
// Throws: UnmappedEdge, DiscontinuousMapping, LoopingExpansion, InvalidPath.
std::vector<EntityId> map_route_down(const MultiLayerGraph& g,
                                     const std::vector<EntityId>& logical_route,
                                     const RouteMapping& mapping);

struct UtilizationResult {
  std::map<Arc, double> fraction;  // per directed arc: flow / link capacity
  ValidationReport overloads;      // arcs with utilization > 1 + tolerance
};

UtilizationResult link_utilization(const ArcFlowMap& link_flows, const Layer& physical);

// Deterministic path extraction from one commodity's arc flows: repeatedly
// peel the lexicographically smallest source-to-destination path in the
// positive-flow subgraph and subtract its bottleneck.
std::vector<PathFlow> decompose_arc_flows(const ArcFlowMap& flows,
                                          const EntityId& source,
                                          const EntityId& destination,
                                          int commodity_id);

}  // namespace mlg
