#include "mlg/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace mlg {

namespace {

using json = nlohmann::json;

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string quoted(const std::string& s) { return "\"" + escape(s) + "\""; }

class JsonWriter {
 public:
  std::string take() { return std::move(out_); }

  void raw(const std::string& text) { out_ += text; }
  void key(const std::string& name) { out_ += quoted(name) + ": "; }
  void str(const std::string& value) { out_ += quoted(value); }
  void rate(double value) { out_ += format_rate(value); }
  void integer(long value) { out_ += std::to_string(value); }
  void boolean(bool value) { out_ += value ? "true" : "false"; }

 private:
  std::string out_;
};

void write_strings(JsonWriter& w, const std::vector<EntityId>& items) {
  w.raw("[");
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) w.raw(", ");
    w.str(items[i]);
  }
  w.raw("]");
}

std::string write_machine(const Report& r) {
  JsonWriter w;
  w.raw("{\n  ");
  w.key("command");
  w.str(r.command);
  w.raw(",\n  ");
  w.key("status");
  w.str(r.status);
  if (r.objective) {
    w.raw(",\n  ");
    w.key("objective");
    w.rate(*r.objective);
  }
  if (r.lp_bound) {
    w.raw(",\n  ");
    w.key("lp_bound");
    w.rate(*r.lp_bound);
  }
  w.raw(",\n  ");
  w.key("bnb_nodes");
  w.integer(r.bnb_nodes);
  w.raw(",\n  ");
  w.key("simplex_iterations");
  w.integer(r.simplex_iterations);

  w.raw(",\n  ");
  w.key("violations");
  w.raw("[");
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    w.raw(i ? ",\n    " : "\n    ");
    w.raw("{");
    w.key("code");
    w.str(violation_name(r.violations[i].code));
    w.raw(", ");
    w.key("detail");
    w.str(r.violations[i].detail);
    w.raw("}");
  }
  w.raw(r.violations.empty() ? "]" : "\n  ]");

  w.raw(",\n  ");
  w.key("links");
  w.raw("[");
  for (std::size_t i = 0; i < r.links.size(); ++i) {
    const ReportLink& link = r.links[i];
    w.raw(i ? ",\n    " : "\n    ");
    w.raw("{");
    w.key("a");
    w.str(link.a);
    w.raw(", ");
    w.key("b");
    w.str(link.b);
    w.raw(", ");
    w.key("installed");
    w.boolean(link.installed);
    w.raw(", ");
    w.key("flow");
    w.rate(link.flow);
    w.raw(", ");
    w.key("capacity");
    w.rate(link.capacity);
    w.raw(", ");
    w.key("weight");
    w.rate(link.weight);
    w.raw(", ");
    w.key("utilization");
    w.rate(link.utilization);
    w.raw("}");
  }
  w.raw(r.links.empty() ? "]" : "\n  ]");

  w.raw(",\n  ");
  w.key("commodities");
  w.raw("[");
  for (std::size_t i = 0; i < r.commodities.size(); ++i) {
    const ReportCommodity& c = r.commodities[i];
    w.raw(i ? ",\n    " : "\n    ");
    w.raw("{");
    w.key("id");
    w.integer(c.id);
    w.raw(", ");
    w.key("subscriber");
    w.str(c.subscriber);
    w.raw(", ");
    w.key("content");
    w.str(c.content);
    w.raw(", ");
    w.key("volume");
    w.rate(c.volume);
    w.raw(", ");
    w.key("servers");
    write_strings(w, c.servers);
    w.raw(", ");
    w.key("paths");
    w.raw("[");
    for (std::size_t p = 0; p < c.paths.size(); ++p) {
      if (p) w.raw(", ");
      w.raw("{");
      w.key("amount");
      w.rate(c.paths[p].amount);
      w.raw(", ");
      w.key("route");
      write_strings(w, c.paths[p].route);
      w.raw("}");
    }
    w.raw("]}");
  }
  w.raw(r.commodities.empty() ? "]" : "\n  ]");
  w.raw("\n}\n");
  return w.take();
}

std::string write_table(const Report& r) {
  std::ostringstream os;
  os << "command: " << r.command << "\n";
  os << "status: " << r.status << "\n";
  if (r.objective) os << "objective: " << format_rate(*r.objective) << "\n";
  if (r.lp_bound) os << "lp bound: " << format_rate(*r.lp_bound) << "\n";
  os << "bnb nodes: " << r.bnb_nodes << "\n";
  os << "simplex iterations: " << r.simplex_iterations << "\n";

  if (!r.violations.empty()) {
    os << "\nviolations (" << r.violations.size() << "):\n";
    for (const Violation& v : r.violations)
      os << "  [" << violation_name(v.code) << "] " << v.detail << "\n";
  } else {
    os << "violations: none\n";
  }

  if (!r.links.empty()) {
    std::size_t installed = 0;
    for (const ReportLink& link : r.links) installed += link.installed ? 1 : 0;
    os << "\nlinks (installed " << installed << "/" << r.links.size() << "):\n";
    for (const ReportLink& link : r.links) {
      os << "  " << (link.installed ? "[x] " : "[ ] ") << link.a << " -- " << link.b
         << "  flow " << format_rate(link.flow) << "  capacity "
         << format_rate(link.capacity) << "  weight " << format_rate(link.weight)
         << "  util " << format_rate(link.utilization) << "\n";
    }
  }

  if (!r.commodities.empty()) {
    os << "\ncommodities:\n";
    for (const ReportCommodity& c : r.commodities) {
      os << "  [" << c.id << "] " << c.subscriber << " <- " << c.content << "  volume "
         << format_rate(c.volume);
      if (!c.servers.empty()) {
        os << "  served by";
        for (const EntityId& s : c.servers) os << " " << s;
      }
      os << "\n";
      for (const ReportPath& p : c.paths) {
        os << "      " << format_rate(p.amount) << " :";
        for (const EntityId& v : p.route) os << " " << v;
        os << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace

std::string format_rate(double value) {
  if (value == 0.0) value = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::optional<ReportFormat> report_format_from_name(std::string_view name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "machine") return ReportFormat::Machine;
  return std::nullopt;
}

std::string write_report(const Report& report, ReportFormat format) {
  return format == ReportFormat::Machine ? write_machine(report) : write_table(report);
}

Report read_report(const std::string& machine_text) {
  json doc;
  try {
    doc = json::parse(machine_text);
  } catch (const json::parse_error& e) {
    fail(Errc::SyntaxError, e.what());
  }
  Report r;
  r.command = doc.value("command", "");
  r.status = doc.value("status", "");
  if (doc.contains("objective")) r.objective = doc["objective"].get<double>();
  if (doc.contains("lp_bound")) r.lp_bound = doc["lp_bound"].get<double>();
  r.bnb_nodes = doc.value("bnb_nodes", 0L);
  r.simplex_iterations = doc.value("simplex_iterations", 0L);
  for (const auto& v : doc.value("violations", json::array())) {
    const std::string code_name = v.value("code", "");
    // codes map back by name
    Violation violation{ViolationCode::InvalidPath, v.value("detail", "")};
    for (int c = 0; c <= static_cast<int>(ViolationCode::InvalidPath); ++c) {
      if (code_name == violation_name(static_cast<ViolationCode>(c))) {
        violation.code = static_cast<ViolationCode>(c);
        break;
      }
    }
    r.violations.push_back(std::move(violation));
  }
  for (const auto& l : doc.value("links", json::array())) {
    ReportLink link;
    link.a = l.value("a", "");
    link.b = l.value("b", "");
    link.installed = l.value("installed", false);
    link.flow = l.value("flow", 0.0);
    link.capacity = l.value("capacity", 0.0);
    link.weight = l.value("weight", 1.0);
    link.utilization = l.value("utilization", 0.0);
    r.links.push_back(std::move(link));
  }
  for (const auto& c : doc.value("commodities", json::array())) {
    ReportCommodity commodity;
    commodity.id = c.value("id", -1);
    commodity.subscriber = c.value("subscriber", "");
    commodity.content = c.value("content", "");
    commodity.volume = c.value("volume", 0.0);
    for (const auto& s : c.value("servers", json::array()))
      commodity.servers.push_back(s.get<std::string>());
    for (const auto& p : c.value("paths", json::array())) {
      ReportPath path;
      path.amount = p.value("amount", 0.0);
      for (const auto& v : p.value("route", json::array()))
        path.route.push_back(v.get<std::string>());
      commodity.paths.push_back(std::move(path));
    }
    r.commodities.push_back(std::move(commodity));
  }
  return r;
}

}  // namespace mlg
