#pragma once

#include <span>
#include <vector>

namespace tail {

/// min c'x  s.t.  Ax = b, x >= 0, with A stored by sparse columns.
class LpModel {
 public:
  explicit LpModel(std::vector<double> rhs = {}) : rhs_(std::move(rhs)) {}

  int rows() const { return static_cast<int>(rhs_.size()); }
  int columns() const { return static_cast<int>(cost_.size()); }
  const std::vector<double>& rhs() const { return rhs_; }
  std::vector<double>& rhs() { return rhs_; }
  double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
  std::span<const int> column_rows(int j) const { return col_rows_[static_cast<std::size_t>(j)]; }
  std::span<const double> column_values(int j) const { return col_vals_[static_cast<std::size_t>(j)]; }

  int add_row(double rhs) {
    rhs_.push_back(rhs);
    return rows() - 1;
  }
  /// Entries with duplicate rows are summed. Returns the column index.
  int add_column(double cost, std::span<const int> rows, std::span<const double> values);

 private:
  std::vector<double> rhs_;
  std::vector<double> cost_;
  std::vector<std::vector<int>> col_rows_;
  std::vector<std::vector<double>> col_vals_;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

struct LpOptions {
  int max_iterations = 0;  ///< 0: 50 * (rows + columns) + 1000
  int refactor_every = 50;
  /// Consecutive degenerate pivots before Bland's rule; -1: 10 * (rows + columns).
  long degenerate_limit = -1;
  double tolerance = 1e-9;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  /// One per row of the model, for the rows as given (not sign-normalized).
  std::vector<double> duals;
  /// Basic variable of each row: a column index, or -1 - r for the internal
  /// artificial of row r. Reusable as a warm start.
  std::vector<int> basis;
  int iterations = 0;
  bool used_bland = false;
};

/// Two-phase revised simplex with an explicit basis inverse. Dantzig pricing;
/// switches to Bland's rule after 10 * (rows + columns) consecutive degenerate
/// pivots. A primal feasible warm basis skips phase one.
LpSolution solve_lp(const LpModel& model, const LpOptions& options = {},
                    std::span<const int> warm_basis = {});

}  // namespace tail
