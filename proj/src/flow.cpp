#include "mlg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace mlg {

namespace {

std::string fmt_rate(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

bool arc_exists(const Layer& layer, const EntityId& from, const EntityId& to) {
  if (layer.find_edge(from, to) != nullptr) return true;
  return layer.has_super_arc(from, to);  // super arcs are one-way
}

void check_path(const Layer& layer, const PathFlow& pf) {
  if (pf.amount < 0.0)
    fail(Errc::InvalidPath, "path flow amount " + fmt_rate(pf.amount) + " is negative");
  if (pf.path.size() < 2)
    fail(Errc::InvalidPath, "path needs at least two vertices");
  std::set<EntityId> seen;
  for (const EntityId& v : pf.path) {
    if (!layer.has_vertex(v))
      fail(Errc::InvalidPath, "path names absent vertex '" + v + "'");
    if (!seen.insert(v).second)
      fail(Errc::InvalidPath, "path revisits vertex '" + v + "'");
  }
  for (std::size_t i = 0; i + 1 < pf.path.size(); ++i) {
    if (!arc_exists(layer, pf.path[i], pf.path[i + 1]))
      fail(Errc::InvalidPath,
           "no arc from '" + pf.path[i] + "' to '" + pf.path[i + 1] + "'");
  }
}

double net_outflow(const ArcFlowMap& flows, const EntityId& node) {
  double net = 0.0;
  for (const auto& [arc, amount] : flows) {
    if (arc.first == node) net += amount;
    if (arc.second == node) net -= amount;
  }
  return net;
}

double flow_through(const ArcFlowMap& flows, const EntityId& node, bool outgoing) {
  double total = 0.0;
  for (const auto& [arc, amount] : flows) {
    const EntityId& end = outgoing ? arc.first : arc.second;
    if (end == node) total += amount;
  }
  return total;
}

}  // namespace

ArcFlowMap aggregate(const Layer& layer, const std::vector<PathFlow>& path_flows) {
  ArcFlowMap flows;
  for (const PathFlow& pf : path_flows) {
    check_path(layer, pf);
    for (std::size_t i = 0; i + 1 < pf.path.size(); ++i)
      flows[{pf.path[i], pf.path[i + 1]}] += pf.amount;
  }
  return flows;
}

std::map<int, ArcFlowMap> aggregate_by_commodity(
    const Layer& layer, const std::vector<PathFlow>& path_flows) {
  std::map<int, std::vector<PathFlow>> grouped;
  for (const PathFlow& pf : path_flows) grouped[pf.commodity].push_back(pf);
  std::map<int, ArcFlowMap> result;
  for (auto& [id, group] : grouped) result[id] = aggregate(layer, group);
  return result;
}

FlowAssignment FlowAssignment::from_paths(const Layer& layer,
                                          std::vector<PathFlow> paths) {
  FlowAssignment a;
  a.link_flows = aggregate(layer, paths);
  a.path_flows = std::move(paths);
  return a;
}

ValidationReport check_demand_satisfaction(const FlowAssignment& assignment,
                                           const std::vector<Commodity>& commodities) {
  ValidationReport report;
  for (const Commodity& c : commodities) {
    double sent = 0.0;
    double arrived = 0.0;
    for (const PathFlow& pf : assignment.path_flows) {
      if (pf.commodity != c.id) continue;
      sent += pf.amount;
      if (!pf.path.empty() && pf.path.back() == c.destination) arrived += pf.amount;
    }
    if (std::abs(sent - c.volume) > kFlowTol)
      report.add(ViolationCode::DemandMismatch,
                 "commodity " + std::to_string(c.id) + " carries " + fmt_rate(sent) +
                     " of volume " + fmt_rate(c.volume) + " (residual " +
                     fmt_rate(sent - c.volume) + ")");
    else if (std::abs(arrived - c.volume) > kFlowTol)
      report.add(ViolationCode::DemandMismatch,
                 "commodity " + std::to_string(c.id) + " delivers " + fmt_rate(arrived) +
                     " of volume " + fmt_rate(c.volume) + " to '" + c.destination + "'");
  }
  report.normalize();
  return report;
}

ValidationReport check_node_balance(const std::map<int, ArcFlowMap>& commodity_flows,
                                    const std::vector<Commodity>& commodities) {
  ValidationReport report;
  for (const Commodity& c : commodities) {
    auto it = commodity_flows.find(c.id);
    static const ArcFlowMap empty;
    const ArcFlowMap& flows = it == commodity_flows.end() ? empty : it->second;

    std::set<EntityId> nodes;
    for (const auto& [arc, amount] : flows) {
      (void)amount;
      nodes.insert(arc.first);
      nodes.insert(arc.second);
    }
    nodes.insert(c.destination);

    // The super source, when present, is the sole supply point; otherwise the
    // surplus may spread over candidate servers but must total the volume.
    const EntityId super_source = c.super_source();
    bool augmented = nodes.count(super_source) > 0;

    double supplied = 0.0;
    for (const EntityId& node : nodes) {
      double net = net_outflow(flows, node);
      if (node == c.destination) {
        if (std::abs(net + c.volume) > kFlowTol)
          report.add(ViolationCode::NodeImbalance,
                     "commodity " + std::to_string(c.id) + " destination '" + node +
                         "' nets " + fmt_rate(net) + ", expected " + fmt_rate(-c.volume));
        continue;
      }
      bool is_source = augmented ? node == super_source
                                 : c.candidate_sources.count(node) > 0;
      if (is_source) {
        if (net < -kFlowTol)
          report.add(ViolationCode::NodeImbalance,
                     "commodity " + std::to_string(c.id) + " source '" + node +
                         "' absorbs " + fmt_rate(-net));
        supplied += net;
        continue;
      }
      if (std::abs(net) > kFlowTol)
        report.add(ViolationCode::NodeImbalance,
                   "commodity " + std::to_string(c.id) + " transit '" + node +
                       "' nets residual " + fmt_rate(net));
    }
    if (std::abs(supplied - c.volume) > kFlowTol)
      report.add(ViolationCode::NodeImbalance,
                 "commodity " + std::to_string(c.id) + " sources supply " +
                     fmt_rate(supplied) + " of volume " + fmt_rate(c.volume));
  }
  report.normalize();
  return report;
}

ValidationReport check_transit_restrictions(
    const std::map<int, ArcFlowMap>& commodity_flows,
    const std::map<EntityId, VertexRole>& roles,
    const std::vector<Commodity>& commodities) {
  ValidationReport report;
  std::vector<EntityId> subscribers;
  for (const auto& [entity, role] : roles)
    if (role == VertexRole::Subscriber) subscribers.push_back(entity);

  for (const Commodity& c : commodities) {
    auto it = commodity_flows.find(c.id);
    if (it == commodity_flows.end()) continue;
    const ArcFlowMap& flows = it->second;
    for (const EntityId& sub : subscribers) {
      double out = flow_through(flows, sub, /*outgoing=*/true);
      if (out > kFlowTol)
        report.add(ViolationCode::TransitViolation,
                   "subscriber '" + sub + "' originates " + fmt_rate(out) +
                       " for commodity " + std::to_string(c.id));
      if (sub != c.destination) {
        double in = flow_through(flows, sub, /*outgoing=*/false);
        if (in > kFlowTol)
          report.add(ViolationCode::TransitViolation,
                     "subscriber '" + sub + "' relays " + fmt_rate(in) +
                         " for commodity " + std::to_string(c.id) + " destined to '" +
                         c.destination + "'");
      }
    }
  }
  report.normalize();
  return report;
}

std::vector<EntityId> map_route_down(const MultiLayerGraph& g,
                                     const std::vector<EntityId>& logical_route,
                                     const RouteMapping& mapping) {
  if (logical_route.size() < 2)
    fail(Errc::InvalidPath, "logical route needs at least two vertices");

  const Layer& physical = g.layer(kPhysicalLayer);
  std::vector<EntityId> result;
  for (std::size_t i = 0; i + 1 < logical_route.size(); ++i) {
    const EntityId& from = logical_route[i];
    const EntityId& to = logical_route[i + 1];
    auto key = std::minmax(from, to);
    auto it = mapping.find(Arc{key.first, key.second});
    if (it == mapping.end())
      fail(Errc::UnmappedEdge, "logical edge (" + from + "," + to + ") has no mapping");

    std::vector<EntityId> segment = it->second;
    if (segment.size() < 2)
      fail(Errc::InvalidPath,
           "mapping of (" + from + "," + to + ") is not a physical path");
    // Segment endpoints must be the physical counterparts of the logical
    // endpoints; orient the segment along the route.
    if (segment.front() == to && segment.back() == from)
      std::reverse(segment.begin(), segment.end());
    if (segment.front() != from || segment.back() != to)
      fail(Errc::DiscontinuousMapping,
           "mapping of (" + from + "," + to + ") runs " + segment.front() + ".." +
               segment.back());
    for (std::size_t k = 0; k + 1 < segment.size(); ++k)
      if (physical.find_edge(segment[k], segment[k + 1]) == nullptr)
        fail(Errc::InvalidPath, "mapped segment step (" + segment[k] + "," +
                                    segment[k + 1] + ") is not a physical link");

    if (result.empty()) {
      result = segment;
    } else {
      if (result.back() != segment.front())
        fail(Errc::DiscontinuousMapping,
             "segments meet at '" + result.back() + "' vs '" + segment.front() + "'");
      result.insert(result.end(), segment.begin() + 1, segment.end());
    }
  }

  std::set<EntityId> seen;
  for (const EntityId& v : result)
    if (!seen.insert(v).second)
      fail(Errc::LoopingExpansion, "expanded route revisits '" + v + "'");
  return result;
}

UtilizationResult link_utilization(const ArcFlowMap& link_flows, const Layer& physical) {
  UtilizationResult result;
  for (const auto& [arc, amount] : link_flows) {
    const LayerEdge* edge = physical.find_edge(arc.first, arc.second);
    if (edge == nullptr || !edge->capacity.has_value()) continue;  // super arcs
    double fraction = amount / *edge->capacity;
    result.fraction[arc] = fraction;
    if (fraction > 1.0 + kFlowTol)
      result.overloads.add(ViolationCode::Overload,
                           "arc (" + arc.first + "," + arc.second + ") carries " +
                               fmt_rate(amount) + " over capacity " +
                               fmt_rate(*edge->capacity));
  }
  result.overloads.normalize();
  return result;
}

namespace {

// Positive-flow successors of `node`, smallest first.
std::vector<EntityId> successors(const ArcFlowMap& flows, const EntityId& node,
                                 double tol) {
  std::vector<EntityId> next;
  auto it = flows.lower_bound(Arc{node, EntityId{}});
  for (; it != flows.end() && it->first.first == node; ++it)
    if (it->second > tol) next.push_back(it->first.second);
  return next;  // map order is already lexicographic
}

bool reaches(const ArcFlowMap& flows, const EntityId& from, const EntityId& target,
             double tol) {
  if (from == target) return true;
  std::set<EntityId> visited{from};
  std::vector<EntityId> stack{from};
  while (!stack.empty()) {
    EntityId v = stack.back();
    stack.pop_back();
    for (const EntityId& next : successors(flows, v, tol)) {
      if (next == target) return true;
      if (visited.insert(next).second) stack.push_back(next);
    }
  }
  return false;
}

}  // namespace

std::vector<PathFlow> decompose_arc_flows(const ArcFlowMap& flows,
                                          const EntityId& source,
                                          const EntityId& destination,
                                          int commodity_id) {
  constexpr double tol = 1e-9;
  ArcFlowMap residual = flows;
  std::vector<PathFlow> paths;

  while (flow_through(residual, source, /*outgoing=*/true) > tol) {
    // Greedy lexicographically smallest path: at each step take the smallest
    // successor that still reaches the destination.
    std::vector<EntityId> path{source};
    while (path.back() != destination) {
      bool advanced = false;
      for (const EntityId& next : successors(residual, path.back(), tol)) {
        if (reaches(residual, next, destination, tol)) {
          path.push_back(next);
          advanced = true;
          break;
        }
      }
      if (!advanced)
        fail(Errc::InvalidPath,
             "flow decomposition stuck at '" + path.back() + "' for commodity " +
                 std::to_string(commodity_id));
    }
    double bottleneck = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      bottleneck = std::min(bottleneck, residual[{path[i], path[i + 1]}]);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      residual[{path[i], path[i + 1]}] -= bottleneck;
    paths.push_back(PathFlow{commodity_id, std::move(path), bottleneck});
  }
  return paths;
}

}  // namespace mlg
