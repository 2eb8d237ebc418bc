// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mlg/flow.hpp"
#include "mlg/pipeline.hpp"
#include "mlg/report.hpp"
#include "mlg/synthesis.hpp"
#include "instance_gen.hpp"
#include "testing.hpp"

using namespace mlg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTol = 1e-6;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SuiteEntry {
  Scenario scenario;
  PipelineArtifacts artifacts;
  SynthesisResult milp;
  OracleResult oracle;
};

std::vector<SuiteEntry> g_suite;

// Criterion 1: solve_milp equals the brute-force optimum on >= 200 random
// instances, agreeing on infeasibility, within 60 seconds total.
void criterion_oracle_equivalence() {
  const int kInstances = 220;
  testing::InstanceGen gen(97531);
  auto start = Clock::now();
  int mismatches = 0, feasible = 0, infeasible = 0;
  for (int i = 0; i < kInstances; ++i) {
    SuiteEntry entry;
    entry.scenario = gen.next();
    entry.artifacts = prepare_pipeline(entry.scenario);
    if (!entry.artifacts.program.has_value()) continue;
    entry.milp = solve_milp(*entry.artifacts.program);
    entry.oracle = brute_force_optimum(*entry.artifacts.program);
    if (entry.milp.status != entry.oracle.status) {
      ++mismatches;
    } else if (entry.milp.status == LpStatus::Optimal) {
      ++feasible;
      if (std::abs(entry.milp.objective - entry.oracle.objective) > kTol) ++mismatches;
    } else {
      ++infeasible;
    }
    g_suite.push_back(std::move(entry));
  }
  const double elapsed = seconds_since(start);
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "oracle equivalence on %zu instances (%d feasible, %d infeasible), "
                "%d mismatches, %.1fs",
                g_suite.size(), feasible, infeasible, mismatches, elapsed);
  report(1, g_suite.size() >= 200 && mismatches == 0 && feasible > 0 &&
                infeasible > 0 && elapsed < 60.0,
         detail);
}

// Criterion 2: every solver output passes the three conservation-statement
// validators and the transit validator with zero violations.
void criterion_conservation() {
  std::size_t violations = 0, checked = 0;
  for (const SuiteEntry& entry : g_suite) {
    if (entry.milp.status != LpStatus::Optimal) continue;
    ++checked;
    std::vector<Commodity> positive;
    for (const Commodity& c : entry.artifacts.commodities)
      if (c.volume > 0.0) positive.push_back(c);

    violations += check_node_balance(entry.milp.commodity_flows, positive).size();
    violations += check_transit_restrictions(entry.milp.commodity_flows,
                                             entry.artifacts.roles, positive)
                      .size();
    violations += link_utilization(entry.milp.total_flows,
                                   entry.artifacts.graph.layer(kPhysicalLayer))
                      .overloads.size();
    // statement 1 + 2 via deterministic path decomposition
    std::vector<PathFlow> paths;
    bool decomposable = true;
    for (const Commodity& c : positive) {
      auto it = entry.milp.commodity_flows.find(c.id);
      if (it == entry.milp.commodity_flows.end()) continue;
      try {
        auto peeled =
            decompose_arc_flows(it->second, c.super_source(), c.destination, c.id);
        paths.insert(paths.end(), peeled.begin(), peeled.end());
      } catch (const Error&) {
        decomposable = false;
      }
    }
    if (!decomposable) {
      ++violations;
      continue;
    }
    FlowAssignment assignment;
    assignment.path_flows = paths;
    violations += check_demand_satisfaction(assignment, positive).size();
  }
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "conservation and transit validators: %zu violations across %zu "
                "solver outputs",
                violations, checked);
  report(2, violations == 0 && checked > 0, detail);
}

// Criterion 3: canonical generation always validates cleanly, and each of the
// six mutation classes is detected in 100% of mutated instances.
void criterion_structure() {
  std::size_t canonical_failures = 0;
  for (const SuiteEntry& entry : g_suite)
    if (!entry.artifacts.structure.empty()) ++canonical_failures;

  struct Mutation {
    const char* name;
    ViolationCode code;
    int applied = 0;
    int detected = 0;
  };
  Mutation mutations[6] = {
      {"subscriber adjacency", ViolationCode::SubscriberAdjacency},
      {"role overlap", ViolationCode::RoleOverlap},
      {"missing counterpart", ViolationCode::MissingCounterpart},
      {"broken star", ViolationCode::BrokenStar},
      {"self loop", ViolationCode::SelfLoop},
      {"zero capacity", ViolationCode::NonPositiveCapacity},
  };

  for (const SuiteEntry& entry : g_suite) {
    const MultiLayerGraph& clean = entry.artifacts.graph;
    std::vector<EntityId> subscribers;
    for (const auto& [id, role] : entry.artifacts.roles)
      if (role == VertexRole::Subscriber) subscribers.push_back(id);

    if (subscribers.size() >= 2) {
      MultiLayerGraph g = clean;
      g.layer(2).edges.push_back(LayerEdge::make(subscribers[0], subscribers[1]));
      ++mutations[0].applied;
      if (validate_structure(g).has(mutations[0].code)) ++mutations[0].detected;
    }
    {
      MultiLayerGraph g = clean;
      g.roles[VertexId{subscribers[0], 2}] = VertexRole::Intermediate;
      ++mutations[1].applied;
      if (validate_structure(g).has(mutations[1].code)) ++mutations[1].detected;
    }
    if (!clean.counterparts.empty()) {
      MultiLayerGraph g = clean;
      g.counterparts.erase(g.counterparts.begin());
      ++mutations[2].applied;
      if (validate_structure(g).has(mutations[2].code)) ++mutations[2].detected;
    }
    if (!clean.layer(3).edges.empty()) {
      MultiLayerGraph g = clean;
      g.layer(3).edges.erase(g.layer(3).edges.begin());
      ++mutations[3].applied;
      if (validate_structure(g).has(mutations[3].code)) ++mutations[3].detected;
    }
    {
      MultiLayerGraph g = clean;
      const EntityId v = *g.layer(1).vertices.begin();
      g.layer(1).edges.push_back(LayerEdge{v, v, 5.0, std::nullopt});
      ++mutations[4].applied;
      if (validate_structure(g).has(mutations[4].code)) ++mutations[4].detected;
    }
    if (!clean.layer(1).edges.empty()) {
      MultiLayerGraph g = clean;
      g.layer(1).edges.front().capacity = 0.0;
      ++mutations[5].applied;
      if (validate_structure(g).has(mutations[5].code)) ++mutations[5].detected;
    }
  }

  bool pass = canonical_failures == 0;
  std::string summary;
  for (const Mutation& m : mutations) {
    pass = pass && m.applied > 10 && m.detected == m.applied;
    summary += std::string(" ") + std::to_string(m.detected) + "/" +
               std::to_string(m.applied);
  }
  report(3, pass,
         "structural suite: " + std::to_string(canonical_failures) +
             " canonical failures; mutations detected" + summary);
}

// Criterion 4: the LP root bound never exceeds the MILP objective, with
// equality whenever the root relaxation is already integral in y.
void criterion_relaxation_bound() {
  std::size_t bound_violations = 0, equality_violations = 0, integral_roots = 0;
  for (const SuiteEntry& entry : g_suite) {
    if (entry.milp.status != LpStatus::Optimal) continue;
    if (entry.milp.lp_bound > entry.milp.objective + kTol) ++bound_violations;

    const NodeLinkProgram& program = *entry.artifacts.program;
    std::vector<double> lower(program.graph.links.size(), 0.0);
    std::vector<double> upper(program.graph.links.size(), 1.0);
    RelaxationResult root = solve_relaxation(program, lower, upper);
    if (root.status != LpStatus::Optimal) {
      ++bound_violations;
      continue;
    }
    bool integral = true;
    for (double y : root.y) integral = integral && std::min(y, 1.0 - y) <= kTol;
    if (integral) {
      ++integral_roots;
      if (std::abs(entry.milp.lp_bound - entry.milp.objective) > kTol)
        ++equality_violations;
    }
  }
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "lp bound <= milp objective everywhere (%zu violations); equality on "
                "%zu integral roots (%zu violations)",
                bound_violations, integral_roots, equality_violations);
  report(4, bound_violations == 0 && equality_violations == 0, detail);
}

// Criterion 5: the worked examples, oracle-verified before pinning.
void criterion_worked_examples() {
  bool pass = true;
  std::string notes;

  {
    PipelineArtifacts a = prepare_pipeline(testing::diamond_scenario());
    SynthesisResult r = solve_milp(*a.program);
    OracleResult o = brute_force_optimum(*a.program);
    const bool ok = r.status == LpStatus::Optimal &&
                    std::abs(o.objective - 12.0) <= kTol &&
                    std::abs(r.objective - 12.0) <= kTol &&
                    r.installed_links.size() == 3;
    pass = pass && ok;
    notes += ok ? " diamond=12/3links" : " diamond=FAIL";
  }
  {
    PipelineArtifacts a = prepare_pipeline(testing::two_server_scenario());
    SynthesisResult r = solve_milp(*a.program);
    OracleResult o = brute_force_optimum(*a.program);
    double from_vs2 = 0.0;
    for (const auto& [arc, amount] : r.total_flows)
      if (arc.first == "vs2") from_vs2 += amount;
    const bool ok = r.status == LpStatus::Optimal &&
                    std::abs(o.objective - 10.0) <= kTol &&
                    std::abs(r.objective - 10.0) <= kTol && from_vs2 <= kTol;
    pass = pass && ok;
    notes += ok ? " two_server=10@vs1" : " two_server=FAIL";
  }
  {
    PipelineArtifacts a = prepare_pipeline(testing::capacity_split_scenario());
    SynthesisResult r = solve_milp(*a.program);
    OracleResult o = brute_force_optimum(*a.program);
    bool caps_ok = r.status == LpStatus::Optimal;
    for (const auto& [arc, amount] : r.total_flows) {
      const LayerEdge* e = a.graph.layer(1).find_edge(arc.first, arc.second);
      if (e != nullptr) caps_ok = caps_ok && amount <= *e->capacity + kTol;
    }
    const bool ok = caps_ok && std::abs(o.objective - 20.0) <= kTol &&
                    std::abs(r.objective - 20.0) <= kTol;
    pass = pass && ok;
    notes += ok ? " capacity_split=20" : " capacity_split=FAIL";
  }
  report(5, pass, "worked examples:" + notes);
}

// Criterion 6: the 50-node / 200-link / 30-commodity scenario solves its LP
// relaxation in < 10 s and the MILP in < 120 s.
void criterion_desk_scale() {
  Scenario scenario = load_scenario(std::string(VODPLAN_DATA_DIR) + "/desk50.json");
  PipelineArtifacts artifacts = prepare_pipeline(scenario);
  if (!artifacts.program.has_value() || !artifacts.structure.empty()) {
    report(6, false, "desk50 scenario failed to prepare");
    return;
  }
  const NodeLinkProgram& program = *artifacts.program;
  std::vector<double> lower(program.graph.links.size(), 0.0);
  std::vector<double> upper(program.graph.links.size(), 1.0);

  SimplexOptions simplex;
  simplex.parallel = true;
  simplex.pivot_limit = 200000;
  auto lp_start = Clock::now();
  RelaxationResult root = solve_relaxation(program, lower, upper, simplex);
  const double lp_seconds = seconds_since(lp_start);

  SolveOptions solve;
  solve.simplex = simplex;
  auto milp_start = Clock::now();
  SynthesisResult result = solve_milp(program, solve);
  const double milp_seconds = seconds_since(milp_start);

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "desk scale (%zu nodes, %zu links, %zu commodities): lp %.2fs "
                "(budget 10s), milp %.2fs (budget 120s), objective %.6f",
                artifacts.graph.layer(1).vertices.size(), program.graph.links.size(),
                program.commodities.size(), lp_seconds, milp_seconds, result.objective);
  report(6, root.status == LpStatus::Optimal && result.status == LpStatus::Optimal &&
                lp_seconds < 10.0 && milp_seconds < 120.0,
         detail);
}

// Criterion 7: repeated synthesize runs produce byte-identical reports.
void criterion_determinism() {
  std::vector<Scenario> scenarios = {testing::diamond_scenario(),
                                     testing::two_server_scenario(),
                                     testing::capacity_split_scenario()};
  testing::InstanceGen gen(24680);
  for (int i = 0; i < 5; ++i) scenarios.push_back(gen.next());
  scenarios.push_back(load_scenario(std::string(VODPLAN_DATA_DIR) + "/desk50.json"));

  std::size_t mismatches = 0;
  for (Scenario& scenario : scenarios) {
    Report first = run_synthesize(scenario);
    Report second = run_synthesize(scenario);
    if (write_report(first, ReportFormat::Machine) !=
        write_report(second, ReportFormat::Machine))
      ++mismatches;
    // a serial rerun must not change a single byte either
    Scenario serial = scenario;
    serial.options.threads = 1;
    Report third = run_synthesize(serial);
    if (write_report(first, ReportFormat::Machine) !=
        write_report(third, ReportFormat::Machine))
      ++mismatches;
  }
  report(7, mismatches == 0,
         "determinism: " + std::to_string(mismatches) + " report mismatches across " +
             std::to_string(scenarios.size()) + " scenarios");
}

}  // namespace

int main() {
  criterion_oracle_equivalence();
  criterion_conservation();
  criterion_structure();
  criterion_relaxation_bound();
  criterion_worked_examples();
  criterion_desk_scale();
  criterion_determinism();

  std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "OK" : "FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
