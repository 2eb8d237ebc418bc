#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mlg/common.hpp"
#include "mlg/demand.hpp"
#include "mlg/graph.hpp"

namespace mlg {

struct ScenarioOptions {
  long pivot_limit = 50000;
  long node_limit = 100000;
  int threads = 0;  // 0 = runtime default; 1 = serial
  bool rounding_heuristic = true;
};

// A flow provided for validation: one routed path of one commodity.
struct ScenarioFlow {
  int commodity = -1;  // index into requests
  std::vector<EntityId> path;
  double amount = 0.0;
};

struct Scenario {
  std::vector<std::pair<EntityId, VertexRole>> entities;
  std::vector<LayerEdge> links;
  Catalog catalog;
  std::vector<Request> requests;
  ScenarioOptions options;
  std::vector<ScenarioFlow> flows;  // optional, consumed by `validate`
};

// Strict JSON parse: unknown fields are rejected, every reference is
// resolved, and failures carry the offending location.
// Throws: SyntaxError, UnknownField, SchemaViolation.
Scenario parse_scenario(const std::string& text);

// parse_scenario over a file. Throws IoError when unreadable.
Scenario load_scenario(const std::string& path);

}  // namespace mlg
