#pragma once

#include <map>
#include <set>
#include <vector>

#include "mlg/common.hpp"
#include "mlg/graph.hpp"

namespace mlg {

// Which video servers host which content.
using Catalog = std::map<ContentId, std::set<EntityId>>;

struct Request {
  EntityId subscriber;
  ContentId content;
  double rate = 0.0;  // rate units, > 0
};

// One routable demand: any candidate server may serve it, wholly or split.
struct Commodity {
  int id = -1;
  std::set<EntityId> candidate_sources;
  EntityId destination;
  double volume = 0.0;

  EntityId super_source() const { return super_source_id(id); }
};

// One commodity per request, in request order; candidate sources come from
// the catalog entry for the requested content.
// Throws: UnknownContent, UnknownSubscriber.
std::vector<Commodity> build_commodities(const std::vector<Request>& requests,
                                         const Catalog& catalog,
                                         const MultiLayerGraph& g);

// Copy of the physical layer with the commodity's super source attached:
// one synthetic vertex and one zero-weight uncapacitated arc to each
// candidate server. Routing s* → destination then folds server selection
// into the flow decision.
// Throws: SourceNotOnLayer1.
std::pair<Layer, VertexId> augment_super_source(const Layer& physical,
                                                const Commodity& commodity);

}  // namespace mlg
