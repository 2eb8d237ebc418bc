// Compares the serial and OpenMP variants of the hot kernels: the simplex
// elimination step, the LP relaxation of the desk-scale scenario, and the
// brute-force oracle enumeration. The parallel variants must reproduce the
// serial results exactly; this binary checks that while timing them.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mlg/pipeline.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void bench_kernel() {
  const int rows = 1200, width = 4000;
  std::mt19937 rng(7);
  std::vector<double> base(static_cast<std::size_t>(rows) * width);
  for (double& v : base) v = (rng() % 2000) / 997.0 - 1.0;

  auto run = [&](bool parallel) {
    std::vector<double> tab = base;
    auto start = Clock::now();
    for (int p = 0; p < 40; ++p) {
      const int r = p % rows, q = (p * 37) % (width - 1);
      double* prow = tab.data() + static_cast<std::size_t>(r) * width;
      // normalize the pivot row as the solver would, keeping values bounded
      if (prow[q] == 0.0) prow[q] = 1.0;
      const double inv = 1.0 / prow[q];
      for (int j = 0; j < width; ++j) prow[j] *= inv;
      prow[q] = 1.0;
      if (parallel)
        mlg::detail::eliminate_parallel(tab.data(), rows, width, r, q);
      else
        mlg::detail::eliminate_serial(tab.data(), rows, width, r, q);
    }
    return std::make_pair(seconds_since(start), std::move(tab));
  };

  auto [t_serial, serial_tab] = run(false);
  auto [t_parallel, parallel_tab] = run(true);
  const bool identical =
      std::memcmp(serial_tab.data(), parallel_tab.data(),
                  serial_tab.size() * sizeof(double)) == 0;
  std::printf("pivot kernel      serial %7.3fs   openmp %7.3fs   speedup %.2fx   %s\n",
              t_serial, t_parallel, t_serial / t_parallel,
              identical ? "bit-identical" : "MISMATCH");
}

void bench_relaxation(const mlg::NodeLinkProgram& program) {
  const std::size_t links = program.graph.links.size();
  std::vector<double> lower(links, 0.0), upper(links, 1.0);

  mlg::SimplexOptions serial;
  serial.parallel = false;
  auto start = Clock::now();
  mlg::RelaxationResult a = mlg::solve_relaxation(program, lower, upper, serial);
  double t_serial = seconds_since(start);

  mlg::SimplexOptions parallel;
  parallel.parallel = true;
  start = Clock::now();
  mlg::RelaxationResult b = mlg::solve_relaxation(program, lower, upper, parallel);
  double t_parallel = seconds_since(start);

  std::printf("lp relaxation     serial %7.3fs   openmp %7.3fs   speedup %.2fx   %s "
              "(objective %.6f, %ld pivots)\n",
              t_serial, t_parallel, t_serial / t_parallel,
              a.objective == b.objective ? "bit-identical" : "MISMATCH", a.objective,
              a.iterations);
}

void bench_milp(const mlg::NodeLinkProgram& program) {
  mlg::SolveOptions options;
  auto start = Clock::now();
  mlg::SynthesisResult result = mlg::solve_milp(program, options);
  double elapsed = seconds_since(start);
  std::printf("milp synthesis    %7.3fs   objective %.6f   %zu links installed   "
              "%ld nodes\n",
              elapsed, result.objective, result.installed_links.size(),
              result.bnb_nodes);
}

void bench_oracle() {
  // Dense 6-node instance at the oracle's 12-link enumeration bound.
  mlg::Scenario s;
  s.entities = {{"vs1", mlg::VertexRole::VideoServer},
                {"vs2", mlg::VertexRole::VideoServer},
                {"x1", mlg::VertexRole::Intermediate},
                {"x2", mlg::VertexRole::Intermediate},
                {"na1", mlg::VertexRole::AccessNode},
                {"a1", mlg::VertexRole::Subscriber}};
  const char* ends[12][2] = {{"vs1", "x1"}, {"vs1", "x2"},  {"vs1", "na1"},
                             {"vs2", "x1"}, {"vs2", "x2"},  {"vs2", "na1"},
                             {"x1", "x2"},  {"x1", "na1"},  {"x2", "na1"},
                             {"na1", "a1"}, {"vs1", "vs2"}, {"x2", "a1"}};
  for (int i = 0; i < 12; ++i)
    s.links.push_back(mlg::LayerEdge::make(ends[i][0], ends[i][1], 6.0 + i % 5));
  s.catalog["c1"] = {"vs1", "vs2"};
  s.requests = {{"a1", "c1", 5.0}, {"a1", "c1", 3.0}};

  mlg::PipelineArtifacts artifacts = mlg::prepare_pipeline(s);
  mlg::SimplexOptions simplex;

  auto start = Clock::now();
  mlg::OracleResult a = mlg::brute_force_optimum(*artifacts.program, simplex, false);
  double t_serial = seconds_since(start);
  start = Clock::now();
  mlg::OracleResult b = mlg::brute_force_optimum(*artifacts.program, simplex, true);
  double t_parallel = seconds_since(start);
  std::printf("oracle (4096 lp)  serial %7.3fs   openmp %7.3fs   speedup %.2fx   %s "
              "(objective %.6f)\n",
              t_serial, t_parallel, t_serial / t_parallel,
              a.objective == b.objective ? "bit-identical" : "MISMATCH", a.objective);
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("openmp: unavailable, parallel variants fall back to serial\n");
#endif

  std::string scenario_path =
      argc > 1 ? argv[1] : std::string(VODPLAN_DATA_DIR) + "/desk50.json";
  mlg::Scenario scenario = mlg::load_scenario(scenario_path);
  mlg::PipelineArtifacts artifacts = mlg::prepare_pipeline(scenario);
  std::printf("scenario: %s (%zu entities, %zu links, %zu requests)\n\n",
              scenario_path.c_str(), scenario.entities.size(), scenario.links.size(),
              scenario.requests.size());

  bench_kernel();
  if (artifacts.program) {
    bench_relaxation(*artifacts.program);
    bench_milp(*artifacts.program);
  }
  bench_oracle();
  return 0;
}
