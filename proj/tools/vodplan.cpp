// vodplan — model a VoD delivery system as a three-layer graph, validate it,
// and synthesize a minimum-occupied-bandwidth physical topology.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mlg/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // infeasible result or violations found
constexpr int kExitUsage = 2;   // usage, parse or I/O errors

struct CommandArgs {
  std::string scenario_path;
  std::string format = "table";
  std::string out_path;
  int threads = -1;  // -1 = leave to the scenario file
  bool serial = false;
  long pivot_limit = 0;
  long node_limit = 0;
  bool no_rounding = false;
};

void add_common_options(CLI::App* cmd, CommandArgs& args) {
  cmd->add_option("scenario", args.scenario_path, "scenario file (JSON)")->required();
  cmd->add_option("--format", args.format, "report format")
      ->check(CLI::IsMember({"table", "machine"}));
  cmd->add_option("--out", args.out_path, "write the report to a file");
  cmd->add_option("--threads", args.threads, "worker threads (0 = runtime default)");
  cmd->add_flag("--serial", args.serial, "single-threaded run (same as --threads 1)");
  cmd->add_option("--pivot-limit", args.pivot_limit, "simplex pivot limit");
  cmd->add_option("--node-limit", args.node_limit, "branch-and-bound node limit");
  cmd->add_flag("--no-rounding", args.no_rounding,
                "disable the installation rounding heuristic");
}

mlg::Scenario load_with_overrides(const CommandArgs& args) {
  mlg::Scenario scenario = mlg::load_scenario(args.scenario_path);
  if (args.serial) scenario.options.threads = 1;
  else if (args.threads >= 0) scenario.options.threads = args.threads;
  if (args.pivot_limit > 0) scenario.options.pivot_limit = args.pivot_limit;
  if (args.node_limit > 0) scenario.options.node_limit = args.node_limit;
  if (args.no_rounding) scenario.options.rounding_heuristic = false;
#ifdef _OPENMP
  if (scenario.options.threads > 0) omp_set_num_threads(scenario.options.threads);
#endif
  return scenario;
}

int emit(const mlg::Report& report, const CommandArgs& args) {
  auto format = mlg::report_format_from_name(args.format);
  std::string text = mlg::write_report(report, *format);
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << args.out_path << "'\n";
      return kExitUsage;
    }
    out << text;
  }
  return report.ok() ? kExitOk : kExitDomain;
}

bool is_usage_error(mlg::Errc code) {
  switch (code) {
    case mlg::Errc::SyntaxError:
    case mlg::Errc::UnknownField:
    case mlg::Errc::SchemaViolation:
    case mlg::Errc::IoError:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vodplan: three-layer VoD network modeling and topology synthesis"};
  app.require_subcommand(1);

  CommandArgs args;
  CLI::App* validate = app.add_subcommand(
      "validate", "check structure and any provided flows against the model rules");
  CLI::App* synthesize = app.add_subcommand(
      "synthesize", "select links and route all demands at minimum occupied bandwidth");
  CLI::App* oracle = app.add_subcommand(
      "oracle", "brute-force optimum over all link subsets (small instances)");
  for (CLI::App* cmd : {validate, synthesize, oracle}) add_common_options(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    mlg::Scenario scenario = load_with_overrides(args);
    mlg::Report report;
    if (validate->parsed()) report = mlg::run_validate(scenario);
    else if (synthesize->parsed()) report = mlg::run_synthesize(scenario);
    else report = mlg::run_oracle(scenario);
    return emit(report, args);
  } catch (const mlg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_usage_error(e.code()) ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
