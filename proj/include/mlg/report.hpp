#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlg/common.hpp"
#include "mlg/validation.hpp"

namespace mlg {

enum class ReportFormat { Table, Machine };

std::optional<ReportFormat> report_format_from_name(std::string_view name);

struct ReportLink {
  EntityId a, b;
  bool installed = false;
  double flow = 0.0;  // both directions combined
  double capacity = 0.0;
  double weight = 1.0;
  double utilization = 0.0;
};

struct ReportPath {
  double amount = 0.0;
  std::vector<EntityId> route;
};

struct ReportCommodity {
  int id = -1;
  EntityId subscriber;
  ContentId content;
  double volume = 0.0;
  std::vector<EntityId> servers;  // serving servers, sorted
  std::vector<ReportPath> paths;
};

struct Report {
  std::string command;  // validate | synthesize | oracle
  std::string status;   // clean | violations | invalid | optimal | infeasible
  std::vector<Violation> violations;
  std::optional<double> objective;
  std::optional<double> lp_bound;
  long bnb_nodes = 0;
  long simplex_iterations = 0;
  std::vector<ReportLink> links;
  std::vector<ReportCommodity> commodities;

  bool ok() const { return status == "clean" || status == "optimal"; }
};

// Deterministic serialization: stable ordering, rates at fixed 6 decimals.
// The machine format is JSON emitted with a fixed key order so equal reports
// are byte-identical.
std::string write_report(const Report& report, ReportFormat format);

// Reads a machine-format report back; write_report(read_report(t)) == t.
Report read_report(const std::string& machine_text);

// %.6f with negative zero normalized away.
std::string format_rate(double value);

}  // namespace mlg
