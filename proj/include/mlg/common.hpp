#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlg {

using EntityId = std::string;
using ContentId = std::string;

// Layer numbering: 1 = physical, 2 = logical server/subscriber, 3 = service.
inline constexpr int kPhysicalLayer = 1;
inline constexpr int kLogicalLayer = 2;
inline constexpr int kServiceLayer = 3;

inline bool is_layer_id(int layer) { return layer >= 1 && layer <= 3; }

enum class VertexRole {
  Subscriber,
  VideoServer,
  AccessNode,
  Intermediate,
  ServiceHub,
};

const char* role_name(VertexRole role);
std::optional<VertexRole> role_from_name(std::string_view name);

// Synthetic entities (the service hub, per-commodity super sources) live in
// the '@' namespace so they can never collide with scenario entity ids.
inline constexpr const char* kHubEntity = "@hub";

inline std::string super_source_id(int commodity) {
  return "@src:" + std::to_string(commodity);
}

inline bool is_synthetic(const EntityId& e) {
  return !e.empty() && e.front() == '@';
}

// A vertex is the replica of an entity on one layer.
struct VertexId {
  EntityId entity;
  int layer = kPhysicalLayer;

  auto operator<=>(const VertexId&) const = default;
};

enum class Errc {
  // graph construction
  DuplicateEntity,
  EdgeEndpointMissing,
  NonPositiveCapacity,
  NoSubscribers,
  NoServers,
  NonAdjacentLayer,
  // demand
  UnknownContent,
  UnknownSubscriber,
  SourceNotOnLayer1,
  // flow
  InvalidPath,
  UnmappedEdge,
  DiscontinuousMapping,
  LoopingExpansion,
  // synthesis
  MissingSuperSource,
  NoCommodities,
  IterationLimitExceeded,
  NodeLimitExceeded,
  TooLargeForOracle,
  NotOptimal,
  // scenario I/O
  SyntaxError,
  UnknownField,
  SchemaViolation,
  IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mlg
