#include "mlg/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mlg {

namespace {

using json = nlohmann::json;

bool valid_id(const std::string& id) {
  if (id.empty() || !std::isalnum(static_cast<unsigned char>(id.front()))) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      return false;
  }
  return true;
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(Errc::SchemaViolation, path + ": missing required field '" + key + "'");
  return *it;
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      fail(Errc::UnknownField, path + "/" + key + ": unknown field");
  }
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(Errc::SchemaViolation, path + ": expected an object");
}

void require_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(Errc::SchemaViolation, path + ": expected an array");
}

std::string require_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(Errc::SchemaViolation, path + ": expected a string");
  return v.get<std::string>();
}

double require_positive(const json& v, const std::string& path) {
  if (!v.is_number())
    fail(Errc::SchemaViolation, path + ": expected a number");
  const double value = v.get<double>();
  if (!std::isfinite(value) || value <= 0.0)
    fail(Errc::SchemaViolation, path + ": expected a finite positive number");
  return value;
}

long require_positive_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer())
    fail(Errc::SchemaViolation, path + ": expected an integer");
  const long value = v.get<long>();
  if (value < 1) fail(Errc::SchemaViolation, path + ": expected a value >= 1");
  return value;
}

std::string item_path(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::SyntaxError, e.what());
  }
  if (!doc.is_object()) fail(Errc::SchemaViolation, "/: expected a JSON object");
  check_keys(doc, {"entities", "links", "catalog", "requests", "options", "flows"}, "");

  Scenario scenario;
  std::set<EntityId> ids;
  std::set<EntityId> servers;
  std::set<EntityId> subscribers;

  const json& entities = require_key(doc, "entities", "/");
  require_array(entities, "/entities");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const std::string path = item_path("/entities", i);
    const json& entry = entities[i];
    require_object(entry, path);
    check_keys(entry, {"id", "role"}, path);
    const std::string id = require_string(require_key(entry, "id", path), path + "/id");
    if (!valid_id(id))
      fail(Errc::SchemaViolation, path + "/id: invalid entity id '" + id + "'");
    if (!ids.insert(id).second)
      fail(Errc::SchemaViolation, path + "/id: duplicate entity '" + id + "'");
    const std::string role_text =
        require_string(require_key(entry, "role", path), path + "/role");
    auto role = role_from_name(role_text);
    if (!role || *role == VertexRole::ServiceHub)
      fail(Errc::SchemaViolation, path + "/role: unknown role '" + role_text + "'");
    if (*role == VertexRole::VideoServer) servers.insert(id);
    if (*role == VertexRole::Subscriber) subscribers.insert(id);
    scenario.entities.emplace_back(id, *role);
  }
  if (subscribers.empty())
    fail(Errc::SchemaViolation, "/entities: at least one subscriber is required");
  if (servers.empty())
    fail(Errc::SchemaViolation, "/entities: at least one video server is required");

  const json& links = require_key(doc, "links", "/");
  require_array(links, "/links");
  std::set<std::pair<EntityId, EntityId>> link_keys;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string path = item_path("/links", i);
    const json& entry = links[i];
    require_object(entry, path);
    check_keys(entry, {"a", "b", "capacity", "weight"}, path);
    const std::string a = require_string(require_key(entry, "a", path), path + "/a");
    const std::string b = require_string(require_key(entry, "b", path), path + "/b");
    for (const std::string* end : {&a, &b}) {
      if (!ids.count(*end))
        fail(Errc::SchemaViolation, path + ": unknown entity '" + *end + "'");
    }
    if (a == b) fail(Errc::SchemaViolation, path + ": link endpoints must differ");
    auto key = std::minmax(a, b);
    if (!link_keys.insert(key).second)
      fail(Errc::SchemaViolation, path + ": duplicate link (" + a + "," + b + ")");
    const double capacity =
        require_positive(require_key(entry, "capacity", path), path + "/capacity");
    std::optional<double> weight;
    if (entry.contains("weight"))
      weight = require_positive(entry["weight"], path + "/weight");
    scenario.links.push_back(LayerEdge::make(a, b, capacity, weight));
  }

  const json& catalog = require_key(doc, "catalog", "/");
  require_object(catalog, "/catalog");
  for (const auto& [content, hosts] : catalog.items()) {
    const std::string path = "/catalog/" + content;
    if (!valid_id(content))
      fail(Errc::SchemaViolation, path + ": invalid content id");
    require_array(hosts, path);
    if (hosts.empty())
      fail(Errc::SchemaViolation, path + ": content needs at least one server");
    std::set<EntityId>& entry = scenario.catalog[content];
    for (std::size_t i = 0; i < hosts.size(); ++i) {
      const std::string host = require_string(hosts[i], item_path(path, i));
      if (!servers.count(host))
        fail(Errc::SchemaViolation,
             item_path(path, i) + ": '" + host + "' is not a video server");
      if (!entry.insert(host).second)
        fail(Errc::SchemaViolation, item_path(path, i) + ": duplicate server '" + host + "'");
    }
  }

  const json& requests = require_key(doc, "requests", "/");
  require_array(requests, "/requests");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const std::string path = item_path("/requests", i);
    const json& entry = requests[i];
    require_object(entry, path);
    check_keys(entry, {"subscriber", "content", "rate"}, path);
    Request request;
    request.subscriber =
        require_string(require_key(entry, "subscriber", path), path + "/subscriber");
    if (!subscribers.count(request.subscriber))
      fail(Errc::SchemaViolation,
           path + "/subscriber: '" + request.subscriber + "' is not a subscriber");
    request.content =
        require_string(require_key(entry, "content", path), path + "/content");
    if (!scenario.catalog.count(request.content))
      fail(Errc::SchemaViolation,
           path + "/content: '" + request.content + "' is not in the catalog");
    request.rate = require_positive(require_key(entry, "rate", path), path + "/rate");
    scenario.requests.push_back(std::move(request));
  }

  if (doc.contains("options")) {
    const json& options = doc["options"];
    require_object(options, "/options");
    check_keys(options, {"pivot_limit", "node_limit", "threads", "rounding_heuristic"},
               "/options");
    if (options.contains("pivot_limit"))
      scenario.options.pivot_limit =
          require_positive_integer(options["pivot_limit"], "/options/pivot_limit");
    if (options.contains("node_limit"))
      scenario.options.node_limit =
          require_positive_integer(options["node_limit"], "/options/node_limit");
    if (options.contains("threads")) {
      const json& t = options["threads"];
      if (!t.is_number_integer() || t.get<long>() < 0)
        fail(Errc::SchemaViolation, "/options/threads: expected an integer >= 0");
      scenario.options.threads = static_cast<int>(t.get<long>());
    }
    if (options.contains("rounding_heuristic")) {
      const json& r = options["rounding_heuristic"];
      if (!r.is_boolean())
        fail(Errc::SchemaViolation, "/options/rounding_heuristic: expected a boolean");
      scenario.options.rounding_heuristic = r.get<bool>();
    }
  }

  if (doc.contains("flows")) {
    const json& flows = doc["flows"];
    require_array(flows, "/flows");
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const std::string path = item_path("/flows", i);
      const json& entry = flows[i];
      require_object(entry, path);
      check_keys(entry, {"commodity", "path", "amount"}, path);
      ScenarioFlow flow;
      const json& commodity = require_key(entry, "commodity", path);
      if (!commodity.is_number_integer())
        fail(Errc::SchemaViolation, path + "/commodity: expected an integer");
      flow.commodity = static_cast<int>(commodity.get<long>());
      if (flow.commodity < 0 ||
          flow.commodity >= static_cast<int>(scenario.requests.size()))
        fail(Errc::SchemaViolation,
             path + "/commodity: no request with index " +
                 std::to_string(flow.commodity));
      const json& vertices = require_key(entry, "path", path);
      require_array(vertices, path + "/path");
      if (vertices.size() < 2)
        fail(Errc::SchemaViolation, path + "/path: needs at least two vertices");
      for (std::size_t k = 0; k < vertices.size(); ++k) {
        const std::string v = require_string(vertices[k], item_path(path + "/path", k));
        if (!ids.count(v))
          fail(Errc::SchemaViolation,
               item_path(path + "/path", k) + ": unknown entity '" + v + "'");
        flow.path.push_back(v);
      }
      const json& amount = require_key(entry, "amount", path);
      if (!amount.is_number())
        fail(Errc::SchemaViolation, path + "/amount: expected a number");
      flow.amount = amount.get<double>();
      if (!std::isfinite(flow.amount) || flow.amount < 0.0)
        fail(Errc::SchemaViolation, path + "/amount: expected a nonnegative number");
      scenario.flows.push_back(std::move(flow));
    }
  }

  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace mlg
