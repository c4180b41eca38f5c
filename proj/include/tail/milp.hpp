#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace tail {

struct MilpVariable {
  std::string name;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool integer = false;
  double cost = 0.0;
};

struct MilpRow {
  std::string name;
  char sense = 'E';  ///< 'E', 'L' or 'G'
  double rhs = 0.0;
  std::vector<int> vars;
  std::vector<double> coefs;
};

/// min cost'x + constant over rows and variable bounds.
struct MilpModel {
  std::string name = "MODEL";
  std::string objective_name = "COST";
  double objective_constant = 0.0;
  std::vector<MilpVariable> variables;
  std::vector<MilpRow> rows;

  int add_variable(std::string name, double lower, double upper, bool integer, double cost);
  int add_row(std::string name, char sense, double rhs);
  /// Adds coef to entry (row, var); entries with equal indices are summed.
  void add_entry(int row, int var, double coef);
  /// Merges duplicate entries and drops zeros; rows sorted by variable.
  void normalize();
};

/// Fixed-format MPS (one entry per COLUMNS/RHS/BOUNDS line, numbers in the
/// shortest form that reads back to the same double). Integer variables sit between INTORG/INTEND markers.
/// The objective constant is written as minus the RHS of the objective row.
void write_mps(const MilpModel& model, std::ostream& out);
/// Reads what write_mps writes (and whitespace-separated MPS in general).
/// Throws InputError on malformed input.
MilpModel read_mps(std::istream& in);

enum class MilpStatus { optimal, infeasible, unbounded, node_limit };

struct MilpResult {
  MilpStatus status = MilpStatus::infeasible;
  double objective = 0.0;  ///< includes the constant
  std::vector<double> x;
  long nodes = 0;
};

/// Depth-first branch and bound on the bundled LP solver, branching on the
/// most fractional integer variable. Meant for small models.
MilpResult solve_milp(const MilpModel& model, long node_limit = 200000);

}  // namespace tail
