#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "tail/master.hpp"
#include "tail/scenario.hpp"

namespace tail {

struct IntegerSolution {
  Solution solution;
  std::vector<int> columns;  ///< pool index per aircraft
  CostBreakdown cost;
};

struct RmhOptions {
  double time_limit = 3600.0;  ///< seconds; <= 0 disables
  long node_limit = 1000000;
};

struct RmhResult {
  std::optional<IntegerSolution> best;
  double root_bound = 0.0;  ///< LP value of the restricted integer master
  long nodes = 0;
  bool limit_hit = false;
};

/// Integer set partitioning over the pooled columns: legs covered exactly once,
/// at most one column per aircraft. An aircraft left without a column flies
/// its empty route, which must then exist in its subgraph; the idle option
/// costs that route's cost. Depth-first branch and bound on the LP relaxation,
/// branching on the most fractional column.
RmhResult restricted_master_heuristic(const ColumnGeneration& cg, const RmhOptions& options = {});

struct DivingOptions {
  int taboo = 15;
  double time_limit = 3600.0;  ///< seconds for the whole dive; <= 0 disables
  /// CSV "node,depth,event,aircraft,column,value,lp_value,backtracks".
  std::ostream* trace = nullptr;
};

struct DivingResult {
  std::optional<IntegerSolution> best;
  double root_bound = 0.0;  ///< c^low of the root column generation
  bool root_converged = false;
  double gap = 0.0;         ///< (total - root_bound) / root_bound
  int nodes = 0;
  int backtracks = 0;
  std::vector<int> taboo;   ///< pool indices
  bool time_limit_hit = false;
  bool taboo_exceeded = false;
};

/// Depth-first diving: column generation at each node, then the column with
/// the largest value (ties: smallest aircraft id, then route hash) is fixed.
/// A child that is unroutable or whose master keeps artificial columns is
/// infeasible: its column becomes taboo and the next candidate is tried; a
/// node without candidates is left for its parent. Fails when more than
/// `taboo` columns are taboo.
DivingResult diving(ColumnGeneration& cg, const DivingOptions& options = {});

}  // namespace tail
