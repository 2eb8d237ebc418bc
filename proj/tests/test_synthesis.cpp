#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mlg/flow.hpp"
#include "mlg/pipeline.hpp"
#include "mlg/synthesis.hpp"
#include "instance_gen.hpp"
#include "testing.hpp"

using namespace mlg;

namespace {

NodeLinkProgram program_for(const Scenario& s, ProgramOptions options = {}) {
  PipelineArtifacts artifacts = prepare_pipeline(s);
  REQUIRE(artifacts.structure.empty());
  std::vector<Commodity> positive;
  for (const Commodity& c : artifacts.commodities)
    if (c.volume > 0.0) positive.push_back(c);
  const Layer& base = options.direct_single_source
                          ? artifacts.graph.layer(kPhysicalLayer)
                          : artifacts.augmented;
  return build_node_link_program(base, artifacts.roles, positive, options);
}

// Validates a synthesis result against all four flow validators.
void check_conservation(const Scenario& s, const PipelineArtifacts& artifacts,
                        const SynthesisResult& result) {
  std::vector<Commodity> positive;
  for (const Commodity& c : artifacts.commodities)
    if (c.volume > 0.0) positive.push_back(c);

  CHECK(check_node_balance(result.commodity_flows, positive).empty());
  CHECK(check_transit_restrictions(result.commodity_flows, artifacts.roles, positive)
            .empty());
  CHECK(link_utilization(result.total_flows, artifacts.graph.layer(kPhysicalLayer))
            .overloads.empty());

  // Coupling: an uninstalled link carries nothing.
  for (const auto& [arc, amount] : result.total_flows) {
    if (is_synthetic(arc.first)) continue;
    const bool installed =
        std::any_of(result.installed_links.begin(), result.installed_links.end(),
                    [&arc](const auto& link) {
                      return (link.first == arc.first && link.second == arc.second) ||
                             (link.first == arc.second && link.second == arc.first);
                    });
    if (!installed) CHECK(amount <= 1e-6);
  }

  // Statement 2 through path decomposition re-aggregation.
  std::vector<PathFlow> all_paths;
  for (const Commodity& c : positive) {
    auto it = result.commodity_flows.find(c.id);
    if (it == result.commodity_flows.end()) continue;
    auto paths = decompose_arc_flows(it->second, c.super_source(), c.destination, c.id);
    for (const PathFlow& p : paths) all_paths.push_back(p);
    ArcFlowMap rebuilt = aggregate(artifacts.augmented, paths);
    for (const auto& [arc, amount] : it->second)
      CHECK(rebuilt[arc] == doctest::Approx(amount).epsilon(1e-6).scale(1.0));
  }
  FlowAssignment assignment;
  assignment.path_flows = all_paths;
  CHECK(check_demand_satisfaction(assignment, positive).empty());
  (void)s;
}

}  // namespace

TEST_CASE("program counting follows the node-link construction") {
  SUBCASE("direct source: 2|links| flow vars, |links| installs, |nodes| balances") {
    ProgramOptions direct;
    direct.direct_single_source = true;
    NodeLinkProgram p = program_for(testing::line_scenario(), direct);
    CHECK(p.graph.links.size() == 3);
    CHECK(p.lp.num_variables() == 2 * 3 + 3);  // flows + installs
    CHECK(p.balance_rows == 4);
    CHECK(p.coupling_rows == 3);
    CHECK(p.lp.num_rows() == 7);
  }
  SUBCASE("augmented source adds one node row and one arc var per candidate") {
    NodeLinkProgram p = program_for(testing::line_scenario());
    CHECK(p.lp.num_variables() == 2 * 3 + 1 + 3);  // + super-source arc
    CHECK(p.balance_rows == 5);                    // + super-source row
    CHECK(p.coupling_rows == 3);
  }
  SUBCASE("the objective covers exactly the physical-arc flow variables") {
    NodeLinkProgram p = program_for(testing::diamond_scenario());
    for (int y : p.y_var) CHECK(p.lp.variable(y).objective == 0.0);
    for (std::size_t a = 0; a < p.graph.arcs.size(); ++a) {
      const int var = p.flow_var[0][a];
      if (var < 0) continue;
      const ArcGraph::ArcInfo& arc = p.graph.arcs[a];
      const double expected =
          arc.link >= 0 ? p.graph.links[static_cast<std::size_t>(arc.link)].weight : 0.0;
      CHECK(p.lp.variable(var).objective == expected);
    }
  }
  SUBCASE("subscriber outgoing variables are fixed at zero") {
    NodeLinkProgram p = program_for(testing::line_scenario());
    int fixed_out = 0;
    for (std::size_t a = 0; a < p.graph.arcs.size(); ++a) {
      if (p.graph.arcs[a].from != "a1") continue;
      const int var = p.flow_var[0][a];
      REQUIRE(var >= 0);
      CHECK(p.lp.variable(var).upper == 0.0);
      ++fixed_out;
    }
    CHECK(fixed_out == 1);  // a1 has one incident link
  }
  SUBCASE("empty commodity list is rejected") {
    Scenario s = testing::line_scenario();
    PipelineArtifacts artifacts = prepare_pipeline(s);
    try {
      build_node_link_program(artifacts.augmented, artifacts.roles, {});
      FAIL("expected NoCommodities");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoCommodities);
    }
  }
  SUBCASE("missing super source is rejected") {
    Scenario s = testing::line_scenario();
    PipelineArtifacts artifacts = prepare_pipeline(s);
    Commodity c;
    c.id = 7;  // no super source attached for this id
    c.candidate_sources = {"vs1"};
    c.destination = "a1";
    c.volume = 1.0;
    try {
      build_node_link_program(artifacts.augmented, artifacts.roles, {c});
      FAIL("expected MissingSuperSource");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingSuperSource);
    }
  }
  SUBCASE("zero-volume commodities are dropped before construction") {
    Scenario s = testing::line_scenario();
    PipelineArtifacts artifacts = prepare_pipeline(s);
    std::vector<Commodity> mixed = artifacts.commodities;
    Commodity zero;
    zero.id = 99;
    zero.candidate_sources = {"vs1"};
    zero.destination = "a1";
    zero.volume = 0.0;
    mixed.push_back(zero);
    NodeLinkProgram p =
        build_node_link_program(artifacts.augmented, artifacts.roles, mixed);
    CHECK(p.commodities.size() == 1);
  }
}

TEST_CASE("the relaxation fast path equals solve_lp on the full program") {
  for (const Scenario& s : {testing::diamond_scenario(), testing::two_server_scenario(),
                            testing::capacity_split_scenario()}) {
    NodeLinkProgram p = program_for(s);
    std::vector<double> lower(p.graph.links.size(), 0.0);
    std::vector<double> upper(p.graph.links.size(), 1.0);
    RelaxationResult reduced = solve_relaxation(p, lower, upper);
    LpSolution full = solve_lp(p.lp);
    REQUIRE(reduced.status == LpStatus::Optimal);
    REQUIRE(full.status == LpStatus::Optimal);
    CHECK(reduced.objective == doctest::Approx(full.objective).epsilon(1e-9));
  }
}

TEST_CASE("line instance: unique path, objective 12") {
  // Brute-force path enumeration on a 3-link chain gives a single route of
  // length 3, so 4 units occupy 12 rate-link units.
  NodeLinkProgram p = program_for(testing::line_scenario());
  std::vector<double> lower(p.graph.links.size(), 0.0);
  std::vector<double> upper(p.graph.links.size(), 1.0);
  RelaxationResult rel = solve_relaxation(p, lower, upper);
  REQUIRE(rel.status == LpStatus::Optimal);
  CHECK(rel.objective == doctest::Approx(12.0));

  OracleResult oracle = brute_force_optimum(p);
  REQUIRE(oracle.status == LpStatus::Optimal);
  CHECK(oracle.objective == doctest::Approx(12.0));

  SUBCASE("demand above the cut capacity is infeasible everywhere") {
    NodeLinkProgram q = program_for(testing::line_scenario(3.0, 4.0));
    CHECK(solve_relaxation(q, lower, upper).status == LpStatus::Infeasible);
    CHECK(solve_lp(q.lp).status == LpStatus::Infeasible);
    CHECK(brute_force_optimum(q).status == LpStatus::Infeasible);
    CHECK(solve_milp(q).status == LpStatus::Infeasible);
  }
}

TEST_CASE("worked instances match their oracle-verified optima") {
  SUBCASE("diamond: objective 12, one parallel branch dropped") {
    Scenario s = testing::diamond_scenario();
    PipelineArtifacts artifacts = prepare_pipeline(s);
    SynthesisResult result = solve_milp(*artifacts.program);
    REQUIRE(result.status == LpStatus::Optimal);
    OracleResult oracle = brute_force_optimum(*artifacts.program);
    CHECK(oracle.objective == doctest::Approx(12.0));
    CHECK(result.objective == doctest::Approx(oracle.objective));
    CHECK(result.installed_links.size() == 3);
    CHECK(result.lp_bound <= result.objective + 1e-6);
    check_conservation(s, artifacts, result);
  }
  SUBCASE("two servers: the 2-hop server wins, objective 10") {
    Scenario s = testing::two_server_scenario();
    PipelineArtifacts artifacts = prepare_pipeline(s);
    SynthesisResult result = solve_milp(*artifacts.program);
    REQUIRE(result.status == LpStatus::Optimal);
    OracleResult oracle = brute_force_optimum(*artifacts.program);
    CHECK(oracle.objective == doctest::Approx(10.0));
    CHECK(result.objective == doctest::Approx(10.0));
    // the serving flow leaves vs1, not vs2
    double from_vs2 = 0.0;
    for (const auto& [arc, amount] : result.total_flows)
      if (arc.first == "vs2") from_vs2 += amount;
    CHECK(from_vs2 == doctest::Approx(0.0));
    check_conservation(s, artifacts, result);
  }
  SUBCASE("capacity split: objective 20, flows within capacity") {
    Scenario s = testing::capacity_split_scenario();
    PipelineArtifacts artifacts = prepare_pipeline(s);
    SynthesisResult result = solve_milp(*artifacts.program);
    REQUIRE(result.status == LpStatus::Optimal);
    OracleResult oracle = brute_force_optimum(*artifacts.program);
    CHECK(oracle.objective == doctest::Approx(20.0));
    CHECK(result.objective == doctest::Approx(20.0));
    for (const auto& [arc, amount] : result.total_flows) {
      const LayerEdge* edge =
          artifacts.graph.layer(kPhysicalLayer).find_edge(arc.first, arc.second);
      if (edge != nullptr) CHECK(amount <= *edge->capacity + 1e-6);
    }
    check_conservation(s, artifacts, result);
  }
}

TEST_CASE("per-link weights scale the occupied-bandwidth objective") {
  // 3-link chain with the middle link at weight 3: 4 units occupy
  // 4*(1 + 3 + 1) = 20 weighted rate-link units, oracle-confirmed.
  Scenario s = testing::line_scenario();
  s.links[1].weight = 3.0;
  PipelineArtifacts artifacts = prepare_pipeline(s);
  SynthesisResult result = solve_milp(*artifacts.program);
  OracleResult oracle = brute_force_optimum(*artifacts.program);
  REQUIRE(result.status == LpStatus::Optimal);
  CHECK(oracle.objective == doctest::Approx(20.0));
  CHECK(result.objective == doctest::Approx(20.0));

  // With a heavy direct link and a light detour, the detour wins.
  Scenario t = testing::diamond_scenario();
  t.links[0].weight = 10.0;  // vs1 - x1
  PipelineArtifacts detour = prepare_pipeline(t);
  SynthesisResult r2 = solve_milp(*detour.program);
  OracleResult o2 = brute_force_optimum(*detour.program);
  REQUIRE(r2.status == LpStatus::Optimal);
  CHECK(r2.objective == doctest::Approx(o2.objective));
  CHECK(r2.objective == doctest::Approx(12.0));  // route via x2 keeps weight 1
}

TEST_CASE("branch and bound without the rounding heuristic still proves optima") {
  SolveOptions plain;
  plain.rounding_heuristic = false;

  SUBCASE("diamond branches at least once") {
    NodeLinkProgram p = program_for(testing::diamond_scenario());
    SynthesisResult result = solve_milp(p, plain);
    REQUIRE(result.status == LpStatus::Optimal);
    CHECK(result.objective == doctest::Approx(12.0));
    CHECK(result.bnb_nodes > 1);  // fractional installs force branching
    CHECK(result.lp_bound <= result.objective + 1e-6);
  }
  SUBCASE("agrees with the oracle across random instances") {
    testing::InstanceGen gen(555);
    int solved = 0;
    for (int i = 0; i < 25; ++i) {
      Scenario s = gen.next();
      PipelineArtifacts artifacts = prepare_pipeline(s);
      if (!artifacts.program.has_value()) continue;
      SynthesisResult with = solve_milp(*artifacts.program);
      SynthesisResult without = solve_milp(*artifacts.program, plain);
      OracleResult oracle = brute_force_optimum(*artifacts.program);
      REQUIRE(with.status == oracle.status);
      REQUIRE(without.status == oracle.status);
      if (oracle.status == LpStatus::Optimal) {
        CHECK(with.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
        CHECK(without.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
        ++solved;
      }
    }
    CHECK(solved >= 10);
  }
}

TEST_CASE("oracle guardrails") {
  SUBCASE("no links, positive demand: infeasible") {
    Scenario s;
    s.entities = {{"vs1", VertexRole::VideoServer}, {"a1", VertexRole::Subscriber}};
    s.catalog["c1"] = {"vs1"};
    s.requests = {{"a1", "c1", 2.0}};
    PipelineArtifacts artifacts = prepare_pipeline(s);
    REQUIRE(artifacts.program.has_value());
    CHECK(brute_force_optimum(*artifacts.program).status == LpStatus::Infeasible);
  }
  SUBCASE("past the enumeration bound") {
    Scenario s;
    for (int i = 0; i < 14; ++i)
      s.entities.emplace_back("x" + std::to_string(i), VertexRole::Intermediate);
    s.entities.emplace_back("vs1", VertexRole::VideoServer);
    s.entities.emplace_back("a1", VertexRole::Subscriber);
    EntityId prev = "vs1";
    for (int i = 0; i < 14; ++i) {
      s.links.push_back(LayerEdge::make(prev, "x" + std::to_string(i), 10.0));
      prev = "x" + std::to_string(i);
    }
    s.links.push_back(LayerEdge::make(prev, "a1", 10.0));
    s.catalog["c1"] = {"vs1"};
    s.requests = {{"a1", "c1", 2.0}};
    PipelineArtifacts artifacts = prepare_pipeline(s);
    try {
      brute_force_optimum(*artifacts.program);
      FAIL("expected TooLargeForOracle");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::TooLargeForOracle);
    }
  }
  SUBCASE("serial and parallel enumeration agree exactly") {
    NodeLinkProgram p = program_for(testing::two_server_scenario());
    OracleResult serial = brute_force_optimum(p, {}, false);
    OracleResult parallel = brute_force_optimum(p, {}, true);
    CHECK(serial.status == parallel.status);
    CHECK(serial.objective == parallel.objective);
  }
}

TEST_CASE("adding a candidate link never worsens the optimum") {
  testing::InstanceGen gen(8181);
  int compared = 0;
  for (int i = 0; i < 30 && compared < 12; ++i) {
    Scenario s = gen.next();
    if (s.links.size() >= 8) continue;
    PipelineArtifacts before = prepare_pipeline(s);
    if (!before.program.has_value()) continue;

    // add one new link between non-adjacent entities, if any pair is left
    Scenario extended = s;
    bool added = false;
    for (std::size_t u = 0; u < s.entities.size() && !added; ++u) {
      for (std::size_t v = u + 1; v < s.entities.size() && !added; ++v) {
        const EntityId& a = s.entities[u].first;
        const EntityId& b = s.entities[v].first;
        bool present = false;
        for (const LayerEdge& e : s.links) present = present || e.connects(a, b);
        if (!present) {
          extended.links.push_back(LayerEdge::make(a, b, 20.0));
          added = true;
        }
      }
    }
    if (!added) continue;

    PipelineArtifacts after = prepare_pipeline(extended);
    OracleResult narrow = brute_force_optimum(*before.program);
    OracleResult wide = brute_force_optimum(*after.program);
    if (narrow.status == LpStatus::Optimal) {
      REQUIRE(wide.status == LpStatus::Optimal);
      CHECK(wide.objective <= narrow.objective + 1e-6);
    }
    ++compared;
  }
  CHECK(compared >= 8);
}

TEST_CASE("extract_topology reduces the physical layer to the installed links") {
  Scenario s = testing::diamond_scenario();
  PipelineArtifacts artifacts = prepare_pipeline(s);
  SynthesisResult result = solve_milp(*artifacts.program);
  REQUIRE(result.status == LpStatus::Optimal);

  MultiLayerGraph reduced = extract_topology(result, artifacts.graph);
  CHECK(reduced.layer(kPhysicalLayer).edges.size() == 3);
  CHECK(reduced.layer(kPhysicalLayer).vertices.size() == 4);  // one branch dropped
  CHECK(validate_structure(reduced).empty());

  SUBCASE("non-optimal input is rejected") {
    SynthesisResult bad;
    bad.status = LpStatus::Infeasible;
    try {
      extract_topology(bad, artifacts.graph);
      FAIL("expected NotOptimal");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotOptimal);
    }
  }
}

TEST_CASE("identical inputs give identical results across runs and kernels") {
  Scenario s = testing::capacity_split_scenario();
  NodeLinkProgram p = program_for(s);

  SolveOptions serial;
  serial.simplex.parallel = false;
  serial.parallel_nodes = false;
  SolveOptions parallel;
  parallel.simplex.parallel = true;
  parallel.parallel_nodes = true;

  SynthesisResult a = solve_milp(p, serial);
  SynthesisResult b = solve_milp(p, serial);
  SynthesisResult c = solve_milp(p, parallel);
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.objective == b.objective);
  CHECK(a.installed_links == b.installed_links);
  CHECK(a.total_flows == b.total_flows);
  CHECK(a.objective == c.objective);
  CHECK(a.installed_links == c.installed_links);
  CHECK(a.total_flows == c.total_flows);
  CHECK(a.simplex_iterations == c.simplex_iterations);
}
