#include "mlg/demand.hpp"

namespace mlg {

std::vector<Commodity> build_commodities(const std::vector<Request>& requests,
                                         const Catalog& catalog,
                                         const MultiLayerGraph& g) {
  std::vector<Commodity> commodities;
  commodities.reserve(requests.size());
  int next_id = 0;
  for (const Request& request : requests) {
    auto role = g.entity_role(request.subscriber);
    if (role != VertexRole::Subscriber)
      fail(Errc::UnknownSubscriber,
           "'" + request.subscriber + "' is not a known subscriber");
    auto entry = catalog.find(request.content);
    if (entry == catalog.end() || entry->second.empty())
      fail(Errc::UnknownContent,
           "content '" + request.content + "' is not in the catalog");
    for (const EntityId& server : entry->second) {
      if (g.entity_role(server) != VertexRole::VideoServer)
        fail(Errc::UnknownContent, "catalog entry '" + request.content +
                                       "' lists non-server '" + server + "'");
    }
    Commodity c;
    c.id = next_id++;
    c.destination = request.subscriber;
    c.volume = request.rate;
    c.candidate_sources = entry->second;
    commodities.push_back(std::move(c));
  }
  return commodities;
}

std::pair<Layer, VertexId> augment_super_source(const Layer& physical,
                                                const Commodity& commodity) {
  for (const EntityId& server : commodity.candidate_sources) {
    if (!physical.has_vertex(server))
      fail(Errc::SourceNotOnLayer1,
           "candidate server '" + server + "' is not on the physical layer");
  }
  Layer augmented = physical;
  EntityId source = commodity.super_source();
  augmented.vertices.insert(source);
  for (const EntityId& server : commodity.candidate_sources)
    augmented.super_arcs.push_back(SuperSourceArc{source, server, commodity.id});
  return {std::move(augmented), VertexId{source, physical.id}};
}

}  // namespace mlg
