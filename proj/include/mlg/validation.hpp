#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace mlg {

enum class ViolationCode {
  // structure
  RoleOverlap,
  SubscriberAdjacency,
  BrokenStar,
  MissingCounterpart,
  DuplicateCounterpart,
  BadCounterpart,
  SelfLoop,
  ParallelEdge,
  EdgeEndpointMissing,
  NonPositiveCapacity,
  CapacityOnLogicalLayer,
  Disconnected,
  // flow
  DemandMismatch,
  NodeImbalance,
  TransitViolation,
  Overload,
  InvalidPath,
};

const char* violation_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string detail;

  bool operator<(const Violation& o) const {
    if (code != o.code) return code < o.code;
    return detail < o.detail;
  }
  bool operator==(const Violation&) const = default;
};

// Violations are findings, not failures: validators collect them in a report
// and leave the decision to the caller.
struct ValidationReport {
  std::vector<Violation> items;

  bool empty() const { return items.empty(); }
  std::size_t size() const { return items.size(); }

  void add(ViolationCode code, std::string detail) {
    items.push_back({code, std::move(detail)});
  }

  void merge(const ValidationReport& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }

  // Stable output order independent of check order.
  void normalize() { std::sort(items.begin(), items.end()); }

  bool has(ViolationCode code) const {
    return std::any_of(items.begin(), items.end(),
                       [code](const Violation& v) { return v.code == code; });
  }

  std::size_t count(ViolationCode code) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(),
                      [code](const Violation& v) { return v.code == code; }));
  }
};

}  // namespace mlg
