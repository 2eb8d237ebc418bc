#include "mlg/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace mlg {

namespace {

constexpr double kZeroFlow = 1e-9;   // below this a flow is numerical noise
constexpr double kIntTol = 1e-6;     // integrality tolerance on installations

std::string arc_label(const ArcGraph::ArcInfo& arc) {
  return "(" + arc.from + ">" + arc.to + ")";
}

}  // namespace

ArcGraph ArcGraph::from_layer(const Layer& physical) {
  ArcGraph g;
  g.links.reserve(physical.edges.size());
  for (const LayerEdge& e : physical.edges) {
    Link link;
    link.a = std::min(e.a, e.b);
    link.b = std::max(e.a, e.b);
    link.capacity = e.capacity.value_or(0.0);
    link.weight = e.weight.value_or(1.0);
    g.links.push_back(std::move(link));
  }
  std::sort(g.links.begin(), g.links.end(), [](const Link& x, const Link& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  for (int k = 0; k < static_cast<int>(g.links.size()); ++k) {
    const Link& link = g.links[static_cast<std::size_t>(k)];
    g.arcs.push_back(ArcInfo{link.a, link.b, k, -1});
    g.arcs.push_back(ArcInfo{link.b, link.a, k, -1});
  }
  g.num_physical_arcs = static_cast<int>(g.arcs.size());

  std::vector<SuperSourceArc> synthetic = physical.super_arcs;
  std::sort(synthetic.begin(), synthetic.end(),
            [](const SuperSourceArc& x, const SuperSourceArc& y) {
              if (x.commodity != y.commodity) return x.commodity < y.commodity;
              if (x.from != y.from) return x.from < y.from;
              return x.to < y.to;
            });
  for (const SuperSourceArc& s : synthetic)
    g.arcs.push_back(ArcInfo{s.from, s.to, -1, s.commodity});

  g.nodes.assign(physical.vertices.begin(), physical.vertices.end());
  return g;
}

NodeLinkProgram build_node_link_program(const Layer& g1_augmented,
                                        const std::map<EntityId, VertexRole>& roles,
                                        const std::vector<Commodity>& commodities,
                                        const ProgramOptions& options) {
  NodeLinkProgram program;
  for (const Commodity& c : commodities)
    if (c.volume > 0.0) program.commodities.push_back(c);
  if (program.commodities.empty())
    fail(Errc::NoCommodities, "the node-link program needs at least one commodity");

  program.graph = ArcGraph::from_layer(g1_augmented);
  const ArcGraph& graph = program.graph;
  const int num_arcs = static_cast<int>(graph.arcs.size());
  const int num_links = static_cast<int>(graph.links.size());
  const int num_commodities = static_cast<int>(program.commodities.size());

  auto is_subscriber = [&roles](const EntityId& e) {
    auto it = roles.find(e);
    return it != roles.end() && it->second == VertexRole::Subscriber;
  };

  for (int d = 0; d < num_commodities; ++d) {
    const Commodity& c = program.commodities[static_cast<std::size_t>(d)];
    if (options.direct_single_source && c.candidate_sources.size() == 1) {
      program.source_of.push_back(*c.candidate_sources.begin());
    } else {
      EntityId source = c.super_source();
      if (!g1_augmented.has_vertex(source))
        fail(Errc::MissingSuperSource,
             "commodity " + std::to_string(c.id) + " has no attached super source");
      program.source_of.push_back(std::move(source));
    }
  }

  // Flow variables: one per commodity and usable arc. Subscribers originate
  // nothing, and traffic may enter a subscriber only for the commodity
  // destined there; those variables exist but are fixed at zero.
  program.flow_var.assign(static_cast<std::size_t>(num_commodities),
                          std::vector<int>(static_cast<std::size_t>(num_arcs), -1));
  for (int d = 0; d < num_commodities; ++d) {
    const Commodity& c = program.commodities[static_cast<std::size_t>(d)];
    for (int a = 0; a < num_arcs; ++a) {
      const ArcGraph::ArcInfo& arc = graph.arcs[static_cast<std::size_t>(a)];
      if (arc.link < 0 && arc.commodity != c.id) continue;  // foreign super arc
      LpVariable v;
      v.name = "x" + std::to_string(c.id) + arc_label(arc);
      v.objective =
          arc.link >= 0 ? graph.links[static_cast<std::size_t>(arc.link)].weight : 0.0;
      if (is_subscriber(arc.from)) v.upper = 0.0;
      if (is_subscriber(arc.to) && arc.to != c.destination) v.upper = 0.0;
      program.flow_var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)] =
          program.lp.add_variable(std::move(v));
    }
  }

  for (int k = 0; k < num_links; ++k) {
    const ArcGraph::Link& link = graph.links[static_cast<std::size_t>(k)];
    LpVariable y;
    y.name = "y(" + link.a + "," + link.b + ")";
    y.upper = 1.0;
    y.integral = true;
    program.y_var.push_back(program.lp.add_variable(std::move(y)));
  }

  // Flow balance per commodity and node: out - in is +volume at the source,
  // -volume at the destination, zero elsewhere.
  for (int d = 0; d < num_commodities; ++d) {
    const Commodity& c = program.commodities[static_cast<std::size_t>(d)];
    const EntityId& source = program.source_of[static_cast<std::size_t>(d)];
    for (const EntityId& node : graph.nodes) {
      if (is_synthetic(node) && node != source) continue;
      LpRow row;
      row.sense = RowSense::Eq;
      row.rhs = node == source ? c.volume : node == c.destination ? -c.volume : 0.0;
      row.name = "bal" + std::to_string(c.id) + "[" + node + "]";
      for (int a = 0; a < num_arcs; ++a) {
        const int var =
            program.flow_var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
        if (var < 0) continue;
        const ArcGraph::ArcInfo& arc = graph.arcs[static_cast<std::size_t>(a)];
        if (arc.from == node) row.terms.emplace_back(var, 1.0);
        else if (arc.to == node) row.terms.emplace_back(var, -1.0);
      }
      program.lp.add_row(std::move(row));
      ++program.balance_rows;
    }
  }

  // Capacity/installation coupling per link: total flow on both directions
  // at most capacity times the installation variable.
  for (int k = 0; k < num_links; ++k) {
    const ArcGraph::Link& link = graph.links[static_cast<std::size_t>(k)];
    LpRow row;
    row.sense = RowSense::Le;
    row.rhs = 0.0;
    row.name = "cap(" + link.a + "," + link.b + ")";
    for (int d = 0; d < num_commodities; ++d) {
      for (int a = 2 * k; a < 2 * k + 2; ++a) {
        const int var =
            program.flow_var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
        if (var >= 0) row.terms.emplace_back(var, 1.0);
      }
    }
    row.terms.emplace_back(program.y_var[static_cast<std::size_t>(k)], -link.capacity);
    program.lp.add_row(std::move(row));
    ++program.coupling_rows;
  }

  return program;
}

RelaxationResult solve_relaxation(const NodeLinkProgram& program,
                                  const std::vector<double>& y_lower,
                                  const std::vector<double>& y_upper,
                                  const SimplexOptions& options) {
  const ArcGraph& graph = program.graph;
  const int num_arcs = static_cast<int>(graph.arcs.size());
  const int num_links = static_cast<int>(graph.links.size());
  const int num_commodities = static_cast<int>(program.commodities.size());

  // Installation variables carry no cost, so the relaxation reduces to a
  // routing LP: flows bounded per link by capacity * y_upper. One balance row
  // per commodity is implied by the rest and dropped (the rows of a commodity
  // sum to zero).
  LinearProgram lp;
  std::vector<std::vector<int>> var(
      static_cast<std::size_t>(num_commodities),
      std::vector<int>(static_cast<std::size_t>(num_arcs), -1));
  for (int d = 0; d < num_commodities; ++d) {
    for (int a = 0; a < num_arcs; ++a) {
      const int full =
          program.flow_var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
      if (full < 0) continue;
      const LpVariable& fv = program.lp.variable(full);
      if (fv.upper <= 0.0) continue;  // transit-fixed
      const ArcGraph::ArcInfo& arc = graph.arcs[static_cast<std::size_t>(a)];
      if (arc.link >= 0 && y_upper[static_cast<std::size_t>(arc.link)] <= 0.0) continue;
      LpVariable v;
      v.objective = fv.objective;
      var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)] =
          lp.add_variable(std::move(v));
    }
  }

  for (int d = 0; d < num_commodities; ++d) {
    const Commodity& c = program.commodities[static_cast<std::size_t>(d)];
    const EntityId& source = program.source_of[static_cast<std::size_t>(d)];
    for (const EntityId& node : graph.nodes) {
      if (node == source) continue;  // implied by the remaining rows
      if (is_synthetic(node)) continue;
      LpRow row;
      row.sense = RowSense::Eq;
      row.rhs = node == c.destination ? -c.volume : 0.0;
      for (int a = 0; a < num_arcs; ++a) {
        const int v = var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
        if (v < 0) continue;
        const ArcGraph::ArcInfo& arc = graph.arcs[static_cast<std::size_t>(a)];
        if (arc.from == node) row.terms.emplace_back(v, 1.0);
        else if (arc.to == node) row.terms.emplace_back(v, -1.0);
      }
      if (row.terms.empty() && row.rhs == 0.0) continue;
      lp.add_row(std::move(row));
    }
  }

  for (int k = 0; k < num_links; ++k) {
    if (y_upper[static_cast<std::size_t>(k)] <= 0.0) continue;
    LpRow row;
    row.sense = RowSense::Le;
    row.rhs = graph.links[static_cast<std::size_t>(k)].capacity *
              std::min(y_upper[static_cast<std::size_t>(k)], 1.0);
    for (int d = 0; d < num_commodities; ++d) {
      for (int a = 2 * k; a < 2 * k + 2; ++a) {
        const int v = var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
        if (v >= 0) row.terms.emplace_back(v, 1.0);
      }
    }
    if (row.terms.empty()) continue;
    lp.add_row(std::move(row));
  }

  RelaxationResult result;
  LpSolution sol = solve_lp(lp, options);
  result.status = sol.status;
  result.iterations = sol.iterations;
  if (sol.status != LpStatus::Optimal) return result;

  result.objective = sol.objective;
  result.flows.assign(static_cast<std::size_t>(num_commodities),
                      std::vector<double>(static_cast<std::size_t>(num_arcs), 0.0));
  for (int d = 0; d < num_commodities; ++d) {
    for (int a = 0; a < num_arcs; ++a) {
      const int v = var[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
      if (v < 0) continue;
      double f = sol.values[static_cast<std::size_t>(v)];
      if (f < kZeroFlow) f = 0.0;
      result.flows[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)] = f;
    }
  }
  // Smallest feasible installation supporting the flows, clamped to the
  // branching bounds.
  result.y.assign(static_cast<std::size_t>(num_links), 0.0);
  for (int k = 0; k < num_links; ++k) {
    double flow = 0.0;
    for (int d = 0; d < num_commodities; ++d)
      flow += result.flows[static_cast<std::size_t>(d)][static_cast<std::size_t>(2 * k)] +
              result.flows[static_cast<std::size_t>(d)][static_cast<std::size_t>(2 * k + 1)];
    double y = flow / graph.links[static_cast<std::size_t>(k)].capacity;
    y = std::max(y, y_lower[static_cast<std::size_t>(k)]);
    y = std::min(y, y_upper[static_cast<std::size_t>(k)]);
    result.y[static_cast<std::size_t>(k)] = y;
  }
  return result;
}

namespace {

struct BnbNode {
  double bound = 0.0;
  long id = 0;
  std::vector<signed char> fix;  // per link: -1 free, 0 or 1 fixed
};

struct NodeOrder {
  bool operator()(const BnbNode& x, const BnbNode& y) const {
    if (x.bound != y.bound) return x.bound > y.bound;  // min-heap on bound
    return x.id > y.id;
  }
};

struct Incumbent {
  bool found = false;
  double value = kInf;
  std::vector<double> y;
  std::vector<std::vector<double>> flows;
};

double link_flow(const ArcGraph& graph, const std::vector<std::vector<double>>& flows,
                 int link) {
  double total = 0.0;
  for (const auto& per_arc : flows)
    total += per_arc[static_cast<std::size_t>(2 * link)] +
             per_arc[static_cast<std::size_t>(2 * link + 1)];
  (void)graph;
  return total;
}

}  // namespace

SynthesisResult solve_milp(const NodeLinkProgram& program, const SolveOptions& options) {
  const ArcGraph& graph = program.graph;
  const int num_links = static_cast<int>(graph.links.size());
  const int num_commodities = static_cast<int>(program.commodities.size());

  SynthesisResult result;
  long nodes_evaluated = 0;
  long iterations = 0;
  long next_id = 0;

  auto bounds_of = [num_links](const std::vector<signed char>& fix) {
    std::vector<double> lower(static_cast<std::size_t>(num_links), 0.0);
    std::vector<double> upper(static_cast<std::size_t>(num_links), 1.0);
    for (int k = 0; k < num_links; ++k) {
      if (fix[static_cast<std::size_t>(k)] == 0) upper[static_cast<std::size_t>(k)] = 0.0;
      if (fix[static_cast<std::size_t>(k)] == 1) lower[static_cast<std::size_t>(k)] = 1.0;
    }
    return std::make_pair(std::move(lower), std::move(upper));
  };

  auto evaluate = [&](const BnbNode& node, const SimplexOptions& simplex) {
    auto [lower, upper] = bounds_of(node.fix);
    return solve_relaxation(program, lower, upper, simplex);
  };

  // The incumbent is shared across the search; updates happen only in the
  // deterministic merge phase below, so exclusion is by construction.
  Incumbent incumbent;
  auto offer_incumbent = [&](double value, std::vector<double> y,
                             const std::vector<std::vector<double>>& flows) {
    if (incumbent.found && value >= incumbent.value - 1e-9) return;
    incumbent.found = true;
    incumbent.value = value;
    incumbent.y = std::move(y);
    incumbent.flows = flows;
  };

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;

  auto process = [&](const BnbNode& node, const RelaxationResult& rel) {
    if (rel.status != LpStatus::Optimal) return;
    if (incumbent.found && rel.objective >= incumbent.value - 1e-9) return;

    // Most fractional installation, ties to the lowest link index.
    int branch_link = -1;
    double best_frac = kIntTol;
    for (int k = 0; k < num_links; ++k) {
      const double y = rel.y[static_cast<std::size_t>(k)];
      const double frac = std::min(y, 1.0 - y);
      if (frac > best_frac) {
        best_frac = frac;
        branch_link = k;
      }
    }

    if (branch_link < 0) {  // integral in y
      std::vector<double> y_int(static_cast<std::size_t>(num_links), 0.0);
      for (int k = 0; k < num_links; ++k)
        y_int[static_cast<std::size_t>(k)] =
            rel.y[static_cast<std::size_t>(k)] > 0.5 ? 1.0 : 0.0;
      offer_incumbent(rel.objective, std::move(y_int), rel.flows);
      return;
    }

    if (options.rounding_heuristic) {
      // Installations are cost-free, so raising every flow-carrying link to 1
      // keeps the objective and is always feasible: the node is solved
      // exactly and never branches.
      std::vector<double> y_round(static_cast<std::size_t>(num_links), 0.0);
      for (int k = 0; k < num_links; ++k) {
        const bool forced = node.fix[static_cast<std::size_t>(k)] == 1;
        y_round[static_cast<std::size_t>(k)] =
            (forced || link_flow(graph, rel.flows, k) > kZeroFlow) ? 1.0 : 0.0;
      }
      offer_incumbent(rel.objective, std::move(y_round), rel.flows);
      if (incumbent.found && rel.objective >= incumbent.value - kIntTol) return;
    }

    for (signed char value : {static_cast<signed char>(0), static_cast<signed char>(1)}) {
      BnbNode child;
      child.bound = rel.objective;
      child.id = next_id++;
      child.fix = node.fix;
      child.fix[static_cast<std::size_t>(branch_link)] = value;
      open.push(std::move(child));
    }
  };

  BnbNode root;
  root.id = next_id++;
  root.fix.assign(static_cast<std::size_t>(num_links), -1);
  RelaxationResult root_rel = evaluate(root, options.simplex);
  ++nodes_evaluated;
  iterations += root_rel.iterations;
  if (root_rel.status != LpStatus::Optimal) {
    result.status = root_rel.status;
    result.bnb_nodes = nodes_evaluated;
    result.simplex_iterations = iterations;
    return result;
  }
  result.lp_bound = root_rel.objective;
  process(root, root_rel);

  const int wave_size = std::max(1, options.wave_size);
  while (!open.empty()) {
    // Deterministic wave: pop the best open nodes, evaluate their
    // relaxations (concurrently when enabled), merge in pop order. The
    // explored tree does not depend on the thread count.
    std::vector<BnbNode> wave;
    while (!open.empty() && static_cast<int>(wave.size()) < wave_size) {
      BnbNode node = std::move(const_cast<BnbNode&>(open.top()));
      open.pop();
      if (incumbent.found && node.bound >= incumbent.value - 1e-9) continue;
      wave.push_back(std::move(node));
    }
    if (wave.empty()) break;
    if (nodes_evaluated + static_cast<long>(wave.size()) > options.node_limit)
      fail(Errc::NodeLimitExceeded,
           "branch and bound exceeded " + std::to_string(options.node_limit) + " nodes");

    SimplexOptions inner = options.simplex;
    if (wave.size() > 1) inner.parallel = false;
    std::vector<RelaxationResult> rels(wave.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (options.parallel_nodes && wave.size() > 1)
#endif
    for (int i = 0; i < static_cast<int>(wave.size()); ++i)
      rels[static_cast<std::size_t>(i)] =
          evaluate(wave[static_cast<std::size_t>(i)], inner);

    for (std::size_t i = 0; i < wave.size(); ++i) {
      ++nodes_evaluated;
      iterations += rels[i].iterations;
      process(wave[i], rels[i]);
    }
  }

  result.bnb_nodes = nodes_evaluated;
  result.simplex_iterations = iterations;
  if (!incumbent.found) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  result.status = LpStatus::Optimal;
  result.objective = std::abs(incumbent.value) < kZeroFlow ? 0.0 : incumbent.value;
  for (int k = 0; k < num_links; ++k) {
    if (incumbent.y[static_cast<std::size_t>(k)] > 0.5)
      result.installed_links.emplace_back(graph.links[static_cast<std::size_t>(k)].a,
                                          graph.links[static_cast<std::size_t>(k)].b);
  }
  for (int d = 0; d < num_commodities; ++d) {
    const Commodity& c = program.commodities[static_cast<std::size_t>(d)];
    ArcFlowMap& flows = result.commodity_flows[c.id];
    for (std::size_t a = 0; a < graph.arcs.size(); ++a) {
      const double f = incumbent.flows[static_cast<std::size_t>(d)][a];
      if (f <= kZeroFlow) continue;
      const ArcGraph::ArcInfo& arc = graph.arcs[a];
      flows[{arc.from, arc.to}] += f;
      result.total_flows[{arc.from, arc.to}] += f;
    }
  }
  return result;
}

OracleResult brute_force_optimum(const NodeLinkProgram& program,
                                 const SimplexOptions& options, bool parallel) {
  const int num_links = static_cast<int>(program.graph.links.size());
  if (num_links > kOracleLinkLimit)
    fail(Errc::TooLargeForOracle,
         std::to_string(num_links) + " links exceed the enumeration bound of " +
             std::to_string(kOracleLinkLimit));

  const long subsets = 1L << num_links;
  std::vector<double> objective(static_cast<std::size_t>(subsets), kInf);
  std::vector<char> feasible(static_cast<std::size_t>(subsets), 0);

  SimplexOptions inner = options;
  inner.parallel = false;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
#endif
  for (long mask = 0; mask < subsets; ++mask) {
    std::vector<double> lower(static_cast<std::size_t>(num_links), 0.0);
    std::vector<double> upper(static_cast<std::size_t>(num_links), 0.0);
    for (int k = 0; k < num_links; ++k) {
      const double bit = (mask >> k) & 1 ? 1.0 : 0.0;
      lower[static_cast<std::size_t>(k)] = bit;
      upper[static_cast<std::size_t>(k)] = bit;
    }
    RelaxationResult rel = solve_relaxation(program, lower, upper, inner);
    if (rel.status == LpStatus::Optimal) {
      objective[static_cast<std::size_t>(mask)] = rel.objective;
      feasible[static_cast<std::size_t>(mask)] = 1;
    }
  }

  OracleResult result;
  for (long mask = 0; mask < subsets; ++mask) {
    if (!feasible[static_cast<std::size_t>(mask)]) continue;
    if (result.status != LpStatus::Optimal ||
        objective[static_cast<std::size_t>(mask)] < result.objective) {
      result.status = LpStatus::Optimal;
      result.objective = objective[static_cast<std::size_t>(mask)];
    }
  }
  if (result.status == LpStatus::Optimal && std::abs(result.objective) < kZeroFlow)
    result.objective = 0.0;
  return result;
}

MultiLayerGraph extract_topology(const SynthesisResult& result,
                                 const MultiLayerGraph& g) {
  if (result.status != LpStatus::Optimal)
    fail(Errc::NotOptimal, "topology extraction needs an optimal synthesis result");

  MultiLayerGraph reduced = g;
  Layer& physical = reduced.layer(kPhysicalLayer);

  std::set<EntityId> keep;
  for (const auto& [a, b] : result.installed_links) {
    keep.insert(a);
    keep.insert(b);
  }
  for (const auto& [arc, flow] : result.total_flows) {
    if (flow <= kZeroFlow) continue;
    if (!is_synthetic(arc.first)) keep.insert(arc.first);
    if (!is_synthetic(arc.second)) keep.insert(arc.second);
  }

  std::vector<LayerEdge> kept_edges;
  for (const LayerEdge& e : physical.edges) {
    const bool installed =
        std::any_of(result.installed_links.begin(), result.installed_links.end(),
                    [&e](const auto& link) { return e.connects(link.first, link.second); });
    if (installed) kept_edges.push_back(e);
  }
  physical.edges = std::move(kept_edges);
  physical.super_arcs.clear();

  std::set<EntityId> removed;
  for (const EntityId& v : physical.vertices)
    if (!keep.count(v)) removed.insert(v);
  for (const EntityId& v : removed) {
    physical.vertices.erase(v);
    reduced.roles.erase(VertexId{v, kPhysicalLayer});
  }
  std::erase_if(reduced.counterparts, [&removed](const CounterpartEdge& c) {
    return c.lower.layer == kPhysicalLayer && removed.count(c.lower.entity) > 0;
  });
  return reduced;
}

}  // namespace mlg
