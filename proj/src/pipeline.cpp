#include "mlg/pipeline.hpp"

#include <algorithm>

#include "mlg/flow.hpp"

namespace mlg {

namespace {

// Links in report order with flows and utilization filled in.
std::vector<ReportLink> link_section(const Scenario& scenario,
                                     const ArcFlowMap& total_flows,
                                     const std::vector<std::pair<EntityId, EntityId>>&
                                         installed) {
  std::vector<ReportLink> out;
  std::vector<LayerEdge> links = scenario.links;
  std::sort(links.begin(), links.end(), [](const LayerEdge& x, const LayerEdge& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  for (const LayerEdge& e : links) {
    ReportLink link;
    link.a = e.a;
    link.b = e.b;
    link.capacity = e.capacity.value_or(0.0);
    link.weight = e.weight.value_or(1.0);
    auto fwd = total_flows.find({e.a, e.b});
    auto bwd = total_flows.find({e.b, e.a});
    if (fwd != total_flows.end()) link.flow += fwd->second;
    if (bwd != total_flows.end()) link.flow += bwd->second;
    link.installed = std::any_of(installed.begin(), installed.end(),
                                 [&e](const auto& pair) {
                                   return e.connects(pair.first, pair.second);
                                 });
    link.utilization = link.capacity > 0.0 ? link.flow / link.capacity : 0.0;
    out.push_back(std::move(link));
  }
  return out;
}

ReportCommodity commodity_entry(const Commodity& c, const Request& request) {
  ReportCommodity entry;
  entry.id = c.id;
  entry.subscriber = c.destination;
  entry.content = request.content;
  entry.volume = c.volume;
  return entry;
}

}  // namespace

SolveOptions solve_options_from(const ScenarioOptions& options) {
  SolveOptions solve;
  solve.simplex.pivot_limit = options.pivot_limit;
  solve.simplex.parallel = options.threads != 1;
  solve.node_limit = options.node_limit;
  solve.rounding_heuristic = options.rounding_heuristic;
  solve.parallel_nodes = options.threads != 1;
  return solve;
}

PipelineArtifacts prepare_pipeline(const Scenario& scenario) {
  PipelineArtifacts artifacts;
  GraphSpec spec = canonical_graph_spec(scenario.entities, scenario.links);
  artifacts.graph = build_graph(spec);
  artifacts.structure = validate_structure(artifacts.graph);
  for (const auto& [id, role] : scenario.entities) artifacts.roles[id] = role;

  artifacts.commodities =
      build_commodities(scenario.requests, scenario.catalog, artifacts.graph);

  artifacts.augmented = artifacts.graph.layer(kPhysicalLayer);
  std::vector<Commodity> positive;
  for (const Commodity& c : artifacts.commodities)
    if (c.volume > 0.0) positive.push_back(c);
  for (const Commodity& c : positive) {
    auto [layer, source] = augment_super_source(artifacts.augmented, c);
    (void)source;
    artifacts.augmented = std::move(layer);
  }
  if (!positive.empty())
    artifacts.program =
        build_node_link_program(artifacts.augmented, artifacts.roles, positive);
  return artifacts;
}

Report run_synthesize(const Scenario& scenario) {
  Report report;
  report.command = "synthesize";

  PipelineArtifacts artifacts = prepare_pipeline(scenario);
  if (!artifacts.structure.empty()) {
    report.status = "invalid";
    report.violations = artifacts.structure.items;
    return report;
  }

  if (!artifacts.program.has_value()) {
    // Nothing to route: the optimum installs nothing and occupies nothing.
    report.status = "optimal";
    report.objective = 0.0;
    report.lp_bound = 0.0;
    report.links = link_section(scenario, {}, {});
    for (const Commodity& c : artifacts.commodities)
      report.commodities.push_back(
          commodity_entry(c, scenario.requests[static_cast<std::size_t>(c.id)]));
    return report;
  }

  SynthesisResult result =
      solve_milp(*artifacts.program, solve_options_from(scenario.options));
  report.bnb_nodes = result.bnb_nodes;
  report.simplex_iterations = result.simplex_iterations;
  if (result.status != LpStatus::Optimal) {
    report.status = "infeasible";
    report.links = link_section(scenario, {}, {});
    return report;
  }

  report.status = "optimal";
  report.objective = result.objective;
  report.lp_bound = result.lp_bound;
  report.links = link_section(scenario, result.total_flows, result.installed_links);

  for (const Commodity& c : artifacts.commodities) {
    ReportCommodity entry =
        commodity_entry(c, scenario.requests[static_cast<std::size_t>(c.id)]);
    auto flows = result.commodity_flows.find(c.id);
    if (flows != result.commodity_flows.end()) {
      std::vector<PathFlow> paths = decompose_arc_flows(
          flows->second, c.super_source(), c.destination, c.id);
      for (PathFlow& path : paths) {
        // Paths start at the synthetic super source; the first real hop is
        // the serving server.
        if (!path.path.empty() && is_synthetic(path.path.front()))
          path.path.erase(path.path.begin());
        if (!path.path.empty()) entry.servers.push_back(path.path.front());
        entry.paths.push_back(ReportPath{path.amount, path.path});
      }
      std::sort(entry.servers.begin(), entry.servers.end());
      entry.servers.erase(std::unique(entry.servers.begin(), entry.servers.end()),
                          entry.servers.end());
    }
    report.commodities.push_back(std::move(entry));
  }
  return report;
}

Report run_validate(const Scenario& scenario) {
  Report report;
  report.command = "validate";

  PipelineArtifacts artifacts = prepare_pipeline(scenario);
  ValidationReport findings = artifacts.structure;

  if (!scenario.flows.empty()) {
    const Layer& physical = artifacts.graph.layer(kPhysicalLayer);
    std::vector<PathFlow> paths;
    for (const ScenarioFlow& f : scenario.flows)
      paths.push_back(PathFlow{f.commodity, f.path, f.amount});
    try {
      FlowAssignment assignment = FlowAssignment::from_paths(physical, paths);
      std::map<int, ArcFlowMap> per_commodity =
          aggregate_by_commodity(physical, paths);
      findings.merge(check_demand_satisfaction(assignment, artifacts.commodities));
      findings.merge(check_node_balance(per_commodity, artifacts.commodities));
      findings.merge(check_transit_restrictions(per_commodity, artifacts.roles,
                                                artifacts.commodities));
      findings.merge(link_utilization(assignment.link_flows, physical).overloads);
      report.links = link_section(scenario, assignment.link_flows, {});
    } catch (const Error& e) {
      findings.add(ViolationCode::InvalidPath, e.what());
    }
  }

  findings.normalize();
  report.violations = findings.items;
  report.status = findings.empty() ? "clean" : "violations";
  return report;
}

Report run_oracle(const Scenario& scenario) {
  Report report;
  report.command = "oracle";

  PipelineArtifacts artifacts = prepare_pipeline(scenario);
  if (!artifacts.structure.empty()) {
    report.status = "invalid";
    report.violations = artifacts.structure.items;
    return report;
  }
  if (!artifacts.program.has_value()) {
    report.status = "optimal";
    report.objective = 0.0;
    return report;
  }

  SolveOptions options = solve_options_from(scenario.options);
  OracleResult result = brute_force_optimum(*artifacts.program, options.simplex,
                                            options.parallel_nodes);
  if (result.status != LpStatus::Optimal) {
    report.status = "infeasible";
    return report;
  }
  report.status = "optimal";
  report.objective = result.objective;
  return report;
}

}  // namespace mlg
