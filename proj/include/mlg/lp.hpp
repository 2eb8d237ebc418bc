#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mlg/common.hpp"

namespace mlg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { Le, Ge, Eq };

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
  bool integral = false;
};

struct LpRow {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
  std::string name;
};

class LinearProgram {
 public:
  int add_variable(LpVariable v) {
    vars_.push_back(std::move(v));
    return static_cast<int>(vars_.size()) - 1;
  }

  void add_row(LpRow row);  // validates that terms reference declared variables

  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  LpVariable& variable(int index) { return vars_.at(static_cast<std::size_t>(index)); }
  const LpVariable& variable(int index) const {
    return vars_.at(static_cast<std::size_t>(index));
  }

 private:
  std::vector<LpVariable> vars_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* lp_status_name(LpStatus status);

struct SimplexOptions {
  long pivot_limit = 50000;
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  bool parallel = false;  // OpenMP row updates in the pivot kernel
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;  // per variable, empty unless Optimal
  double objective = 0.0;
  long iterations = 0;
};

// Two-phase primal simplex on a dense tableau. Pricing is Dantzig with a
// switch to Bland's rule after a degenerate streak, which guarantees
// termination. Minimizes the objective.
// Throws IterationLimitExceeded past options.pivot_limit.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

namespace detail {

// Rank-1 tableau elimination step: for every row but the pivot row, subtract
// multiplier * pivot_row. Exposed so the serial and OpenMP variants can be
// compared directly in tests and benchmarks; both produce bit-identical
// tableaus because each row is updated independently.
void eliminate_serial(double* tableau, int rows, int width, int pivot_row,
                      int pivot_col);
void eliminate_parallel(double* tableau, int rows, int width, int pivot_row,
                        int pivot_col);

}  // namespace detail

}  // namespace mlg
