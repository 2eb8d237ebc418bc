#include "mlg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace mlg {

const char* lp_status_name(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

void LinearProgram::add_row(LpRow row) {
  for (const auto& [index, coef] : row.terms) {
    (void)coef;
    if (index < 0 || index >= static_cast<int>(vars_.size()))
      throw std::out_of_range("row '" + row.name + "' references undeclared variable " +
                              std::to_string(index));
  }
  rows_.push_back(std::move(row));
}

namespace detail {

void eliminate_serial(double* tableau, int rows, int width, int pivot_row,
                      int pivot_col) {
  const double* prow = tableau + static_cast<std::size_t>(pivot_row) * width;
  for (int i = 0; i < rows; ++i) {
    if (i == pivot_row) continue;
    double* row = tableau + static_cast<std::size_t>(i) * width;
    const double f = row[pivot_col];
    if (f == 0.0) continue;
    for (int j = 0; j < width; ++j) row[j] -= f * prow[j];
    row[pivot_col] = 0.0;
  }
}

void eliminate_parallel(double* tableau, int rows, int width, int pivot_row,
                        int pivot_col) {
#ifdef _OPENMP
  const double* prow = tableau + static_cast<std::size_t>(pivot_row) * width;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) {
    if (i == pivot_row) continue;
    double* row = tableau + static_cast<std::size_t>(i) * width;
    const double f = row[pivot_col];
    if (f == 0.0) continue;
    for (int j = 0; j < width; ++j) row[j] -= f * prow[j];
    row[pivot_col] = 0.0;
  }
#else
  eliminate_serial(tableau, rows, width, pivot_row, pivot_col);
#endif
}

}  // namespace detail

namespace {

constexpr double kFixedTol = 1e-12;

struct BuildRow {
  std::vector<std::pair<int, double>> terms;  // column index, coefficient
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
};

// Dense two-phase tableau. Column layout: structural columns for the free
// variables, then slack/surplus columns, then artificial columns, then the
// right-hand side. Row m holds the phase-2 reduced costs and row m+1 the
// phase-1 reduced costs; both keep -z in the rhs cell and are updated by the
// same elimination kernel as the constraint rows, so phase 2 starts priced
// out.
class Tableau {
 public:
  Tableau(std::vector<BuildRow> rows, const std::vector<double>& costs,
          const SimplexOptions& options)
      : options_(options), nstruct_(static_cast<int>(costs.size())) {
    m_ = static_cast<int>(rows.size());
    int nslack = 0, nart = 0;
    for (auto& row : rows) {
      if (row.rhs < 0.0) {
        row.rhs = -row.rhs;
        for (auto& [c, a] : row.terms) a = -a;
        if (row.sense == RowSense::Le) row.sense = RowSense::Ge;
        else if (row.sense == RowSense::Ge) row.sense = RowSense::Le;
      }
      if (row.sense != RowSense::Eq) ++nslack;
      if (row.sense != RowSense::Le) ++nart;
    }
    slack_begin_ = nstruct_;
    art_begin_ = nstruct_ + nslack;
    ncols_ = art_begin_ + nart;
    width_ = ncols_ + 1;
    tab_.assign(static_cast<std::size_t>(m_ + 2) * width_, 0.0);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    row_active_.assign(static_cast<std::size_t>(m_), true);
    locked_.assign(static_cast<std::size_t>(ncols_), false);

    int next_slack = slack_begin_, next_art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      double* row = at(i);
      for (const auto& [c, a] : rows[static_cast<std::size_t>(i)].terms) row[c] += a;
      row[width_ - 1] = rows[static_cast<std::size_t>(i)].rhs;
      switch (rows[static_cast<std::size_t>(i)].sense) {
        case RowSense::Le:
          row[next_slack] = 1.0;
          basis_[static_cast<std::size_t>(i)] = next_slack++;
          break;
        case RowSense::Ge:
          row[next_slack++] = -1.0;
          row[next_art] = 1.0;
          basis_[static_cast<std::size_t>(i)] = next_art++;
          break;
        case RowSense::Eq:
          row[next_art] = 1.0;
          basis_[static_cast<std::size_t>(i)] = next_art++;
          break;
      }
    }

    // Phase-2 reduced costs: the initial basis (slacks, artificials) has zero
    // cost, so the raw objective row is already consistent.
    double* obj = at(m_);
    for (int j = 0; j < nstruct_; ++j) obj[j] = costs[static_cast<std::size_t>(j)];

    // Phase-1 reduced costs: unit cost on artificials, priced out against the
    // rows where they start basic.
    if (nart > 0) {
      double* p1 = at(m_ + 1);
      for (int j = art_begin_; j < ncols_; ++j) p1[j] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
        const double* row = at(i);
        for (int j = 0; j < width_; ++j) p1[j] -= row[j];
      }
    }
    has_artificials_ = nart > 0;
  }

  long iterations() const { return iterations_; }

  // Phase 1: minimizes total artificial value, then retires the artificials.
  // Returns false when the residual infeasibility stays above tolerance.
  bool run_phase1() {
    if (!has_artificials_) return true;
    run(m_ + 1, /*phase1=*/true);
    if (-at(m_ + 1)[width_ - 1] > options_.feasibility_tol) return false;
    retire_artificials();
    return true;
  }

  // Phase 2 on the actual objective. Returns false when unbounded.
  bool run_phase2() { return run(m_, /*phase1=*/false); }

  void extract(std::vector<double>& struct_values) const {
    struct_values.assign(static_cast<std::size_t>(nstruct_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (row_active_[static_cast<std::size_t>(i)] && b >= 0 && b < nstruct_)
        struct_values[static_cast<std::size_t>(b)] = at(i)[width_ - 1];
    }
  }

 private:
  double* at(int row) { return tab_.data() + static_cast<std::size_t>(row) * width_; }
  const double* at(int row) const {
    return tab_.data() + static_cast<std::size_t>(row) * width_;
  }

  bool run(int obj_row, bool phase1) {
    bool bland = false;
    int degenerate_streak = 0;
    double last_z = -at(obj_row)[width_ - 1];
    for (;;) {
      const int q = price(obj_row, phase1, bland);
      if (q < 0) return true;
      const int r = ratio_test(q);
      if (r < 0) return phase1;  // phase 1 is bounded below by zero
      pivot(r, q);
      const double z = -at(obj_row)[width_ - 1];
      if (z < last_z - 1e-12) {
        degenerate_streak = 0;
        bland = false;
      } else if (++degenerate_streak >= 64) {
        bland = true;  // anti-cycling: Bland's rule until progress resumes
      }
      last_z = z;
    }
  }

  int price(int obj_row, bool phase1, bool bland) const {
    const double* d = at(obj_row);
    const int limit = phase1 ? ncols_ : art_begin_;
    int best = -1;
    double best_value = -options_.optimality_tol;
    for (int j = 0; j < limit; ++j) {
      if (locked_[static_cast<std::size_t>(j)]) continue;
      if (d[j] < best_value) {
        if (bland) return j;
        best = j;
        best_value = d[j];
      }
    }
    return best;
  }

  int ratio_test(int q) const {
    int best = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m_; ++i) {
      if (!row_active_[static_cast<std::size_t>(i)]) continue;
      const double* row = at(i);
      if (row[q] <= options_.pivot_tol) continue;
      const double ratio = row[width_ - 1] / row[q];
      if (best < 0 || ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 &&
           basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(best)])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

  void pivot(int r, int q) {
    if (++iterations_ > options_.pivot_limit)
      fail(Errc::IterationLimitExceeded,
           "simplex exceeded " + std::to_string(options_.pivot_limit) + " pivots");
    double* prow = at(r);
    const double inv = 1.0 / prow[q];
    for (int j = 0; j < width_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    // The elimination skips rows with a zero pivot-column entry, so forking
    // threads only pays off when the column is dense enough. Both kernels
    // produce bit-identical tableaus, so the dispatch cannot change results.
    bool parallel = options_.parallel;
    if (parallel) {
      constexpr int kMinDenseRows = 48;
      int nonzero = 0;
      for (int i = 0; i < m_ + 2 && nonzero < kMinDenseRows; ++i)
        if (tab_[static_cast<std::size_t>(i) * width_ + q] != 0.0) ++nonzero;
      parallel = nonzero >= kMinDenseRows;
    }
    if (parallel)
      detail::eliminate_parallel(tab_.data(), m_ + 2, width_, r, q);
    else
      detail::eliminate_serial(tab_.data(), m_ + 2, width_, r, q);
    const int leaving = basis_[static_cast<std::size_t>(r)];
    if (leaving >= art_begin_) locked_[static_cast<std::size_t>(leaving)] = true;
    basis_[static_cast<std::size_t>(r)] = q;
  }

  // Zero-valued artificials left basic after phase 1 leave through a
  // degenerate pivot where possible; rows offering no pivot entry are
  // redundant and retire from the ratio test.
  void retire_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
      const double* row = at(i);
      int col = -1;
      for (int j = 0; j < art_begin_; ++j) {
        if (std::abs(row[j]) > options_.pivot_tol) {
          col = j;
          break;
        }
      }
      if (col >= 0)
        pivot(i, col);
      else
        row_active_[static_cast<std::size_t>(i)] = false;
    }
    for (int j = art_begin_; j < ncols_; ++j) locked_[static_cast<std::size_t>(j)] = true;
  }

  SimplexOptions options_;
  int nstruct_ = 0;
  int m_ = 0;
  int slack_begin_ = 0;
  int art_begin_ = 0;
  int ncols_ = 0;
  int width_ = 0;
  bool has_artificials_ = false;
  long iterations_ = 0;
  std::vector<double> tab_;
  std::vector<int> basis_;
  std::vector<bool> row_active_;
  std::vector<bool> locked_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  const int n = static_cast<int>(lp.num_variables());
  LpSolution solution;

  // Presolve: substitute fixed variables, shift lower bounds to zero, and
  // turn finite upper bounds into explicit tableau rows.
  std::vector<double> base_value(static_cast<std::size_t>(n), 0.0);
  std::vector<int> col_of(static_cast<std::size_t>(n), -1);
  std::vector<double> costs;
  std::vector<int> var_of_col;
  for (int i = 0; i < n; ++i) {
    const LpVariable& v = lp.variable(i);
    if (v.upper < v.lower - kFixedTol) return solution;  // crossed bounds
    base_value[static_cast<std::size_t>(i)] = v.lower;
    if (v.upper - v.lower <= kFixedTol) continue;  // fixed at its lower bound
    col_of[static_cast<std::size_t>(i)] = static_cast<int>(costs.size());
    costs.push_back(v.objective);
    var_of_col.push_back(i);
  }

  std::vector<BuildRow> build_rows;
  build_rows.reserve(lp.num_rows() + costs.size());
  for (const LpRow& row : lp.rows()) {
    BuildRow b;
    b.sense = row.sense;
    b.rhs = row.rhs;
    for (const auto& [var, coef] : row.terms) {
      b.rhs -= coef * base_value[static_cast<std::size_t>(var)];
      const int col = col_of[static_cast<std::size_t>(var)];
      if (col >= 0 && coef != 0.0) b.terms.emplace_back(col, coef);
    }
    if (b.terms.empty()) {
      const bool ok = (b.sense == RowSense::Le && b.rhs >= -options.feasibility_tol) ||
                      (b.sense == RowSense::Ge && b.rhs <= options.feasibility_tol) ||
                      (b.sense == RowSense::Eq &&
                       std::abs(b.rhs) <= options.feasibility_tol);
      if (!ok) return solution;  // constant row violated
      continue;
    }
    build_rows.push_back(std::move(b));
  }
  for (std::size_t c = 0; c < var_of_col.size(); ++c) {
    const LpVariable& v = lp.variable(var_of_col[c]);
    if (v.upper == kInf) continue;
    BuildRow b;
    b.sense = RowSense::Le;
    b.rhs = v.upper - v.lower;
    b.terms.emplace_back(static_cast<int>(c), 1.0);
    build_rows.push_back(std::move(b));
  }

  std::vector<double> struct_values(costs.size(), 0.0);
  if (build_rows.empty()) {
    // Unconstrained: any free variable with negative cost runs away.
    for (double c : costs) {
      if (c < -options.optimality_tol) {
        solution.status = LpStatus::Unbounded;
        return solution;
      }
    }
  } else {
    Tableau tableau(std::move(build_rows), costs, options);
    if (!tableau.run_phase1()) {
      solution.iterations = tableau.iterations();
      return solution;  // infeasible
    }
    if (!tableau.run_phase2()) {
      solution.status = LpStatus::Unbounded;
      solution.iterations = tableau.iterations();
      return solution;
    }
    tableau.extract(struct_values);
    solution.iterations = tableau.iterations();
  }

  solution.status = LpStatus::Optimal;
  solution.values.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    solution.values[static_cast<std::size_t>(i)] = base_value[static_cast<std::size_t>(i)];
  for (std::size_t c = 0; c < var_of_col.size(); ++c) {
    double v = solution.values[static_cast<std::size_t>(var_of_col[c])] + struct_values[c];
    if (std::abs(v) < 1e-11) v = 0.0;
    solution.values[static_cast<std::size_t>(var_of_col[c])] = v;
  }
  double objective = 0.0;
  for (int i = 0; i < n; ++i)
    objective += lp.variable(i).objective * solution.values[static_cast<std::size_t>(i)];
  solution.objective = objective;
  return solution;
}

}  // namespace mlg
