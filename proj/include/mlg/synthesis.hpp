#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mlg/demand.hpp"
#include "mlg/flow.hpp"
#include "mlg/graph.hpp"
#include "mlg/lp.hpp"

namespace mlg {

// Directed-arc expansion of the physical layer: every undirected link becomes
// two opposed arcs sharing the link's capacity and installation decision;
// super-source arcs are one-way, uncapacitated and cost-free.
struct ArcGraph {
  struct Link {
    EntityId a, b;
    double capacity = 0.0;
    double weight = 1.0;
  };
  struct ArcInfo {
    EntityId from, to;
    int link = -1;       // -1 marks a synthetic super-source arc
    int commodity = -1;  // owner of a synthetic arc
  };

  std::vector<Link> links;      // sorted by endpoints
  std::vector<ArcInfo> arcs;    // arcs 2k, 2k+1 belong to link k; synthetic after
  std::vector<EntityId> nodes;  // sorted
  int num_physical_arcs = 0;

  static ArcGraph from_layer(const Layer& physical);
};

struct ProgramOptions {
  // Route single-candidate commodities straight from their server instead of
  // requiring an attached super source. Used to show the super-source
  // reduction leaves the optimum unchanged.
  bool direct_single_source = false;
};

// The node-link program: the generic LP plus the bookkeeping that maps
// variables back to (commodity, arc) and link.
struct NodeLinkProgram {
  LinearProgram lp;
  ArcGraph graph;
  std::vector<Commodity> commodities;      // positive-volume, program order
  std::vector<std::vector<int>> flow_var;  // [commodity order][arc] → var or -1
  std::vector<int> y_var;                  // [link] → var
  std::vector<EntityId> source_of;         // routing source per commodity
  int balance_rows = 0;
  int coupling_rows = 0;
};

// Builds flow-balance equalities per commodity and node, capacity/installation
// coupling per link, transit fixings for subscriber nodes, and the occupied
// bandwidth objective over physical arcs.
// Throws: NoCommodities, MissingSuperSource.
NodeLinkProgram build_node_link_program(const Layer& g1_augmented,
                                        const std::map<EntityId, VertexRole>& roles,
                                        const std::vector<Commodity>& commodities,
                                        const ProgramOptions& options = {});

struct RelaxationResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> y;                    // per link, reconstructed
  std::vector<std::vector<double>> flows;   // [commodity order][arc]
  long iterations = 0;
};

// LP relaxation under per-link installation bounds ([0,1] for the free
// program; branching narrows them). Installation variables carry no cost, so
// they are eliminated: each coupling row becomes a capacity row at
// capacity * upper bound and y is reconstructed as the smallest feasible
// value. The objective matches solve_lp on the full program exactly.
RelaxationResult solve_relaxation(const NodeLinkProgram& program,
                                  const std::vector<double>& y_lower,
                                  const std::vector<double>& y_upper,
                                  const SimplexOptions& options = {});

struct SolveOptions {
  SimplexOptions simplex;
  long node_limit = 100000;
  // Round the relaxation up to an integral installation with the same
  // objective whenever that is feasible; closes the gap without branching.
  bool rounding_heuristic = true;
  // Open subproblems are evaluated in deterministic waves; a wave's LPs may
  // run concurrently, results are merged in pop order.
  int wave_size = 8;
  bool parallel_nodes = true;
};

struct SynthesisResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<std::pair<EntityId, EntityId>> installed_links;
  std::map<int, ArcFlowMap> commodity_flows;  // keyed by commodity id
  ArcFlowMap total_flows;
  double objective = 0.0;
  double lp_bound = 0.0;  // root relaxation objective
  long bnb_nodes = 0;
  long simplex_iterations = 0;
};

// Branch-and-bound on fractional installation variables: most-fractional
// branching (ties to the lowest link index), best-first node order, proven
// optimum on return.
// Throws: NodeLimitExceeded.
SynthesisResult solve_milp(const NodeLinkProgram& program,
                           const SolveOptions& options = {});

struct OracleResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
};

// Exhaustive verification oracle: routing LP over every link subset.
// Throws TooLargeForOracle past kOracleLinkLimit links.
inline constexpr int kOracleLinkLimit = 12;
OracleResult brute_force_optimum(const NodeLinkProgram& program,
                                 const SimplexOptions& options = {},
                                 bool parallel = true);

// The input graph with the physical layer reduced to the installed links and
// the vertices touched by flow.
// Throws: NotOptimal.
MultiLayerGraph extract_topology(const SynthesisResult& result,
                                 const MultiLayerGraph& g);

}  // namespace mlg
