#pragma once

#include <map>
#include <optional>

#include "mlg/report.hpp"
#include "mlg/scenario.hpp"
#include "mlg/synthesis.hpp"

namespace mlg {

// Everything the pipeline derives from a scenario before solving. Exposed so
// tests and tools can reuse the exact artifacts the CLI works on.
struct PipelineArtifacts {
  MultiLayerGraph graph;
  ValidationReport structure;
  std::map<EntityId, VertexRole> roles;
  std::vector<Commodity> commodities;       // request order, zero volumes kept
  Layer augmented;                          // physical layer + super sources
  std::optional<NodeLinkProgram> program;   // absent without positive demand
};

PipelineArtifacts prepare_pipeline(const Scenario& scenario);

SolveOptions solve_options_from(const ScenarioOptions& options);

Report run_synthesize(const Scenario& scenario);
Report run_validate(const Scenario& scenario);
Report run_oracle(const Scenario& scenario);

}  // namespace mlg
