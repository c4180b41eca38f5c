#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tail/heuristics.hpp"
#include "tail/milp.hpp"
#include "tail/model.hpp"
#include "tail/scenario.hpp"

namespace tail {

/// Every source-sink path of the subgraph, depth first. Throws LimitError when
/// more than `limit` routes exist.
std::vector<Route> enumerate_routes(const Subgraph& subgraph, long limit = 1000000);

struct ExactOptions {
  long route_limit = 1000000;  ///< per aircraft
  long node_limit = 200000000;
};

struct ExactResult {
  Solution solution;
  CostBreakdown cost;
  long nodes = 0;
};

/// Optimal solution of the sample-average problem by searching one route per
/// aircraft, pruning on activity overlap and on cost bounds. The last aircraft
/// is matched through a table keyed by the legs left to cover. Throws
/// InfeasibleError when no partition exists, LimitError when the instance is
/// too large (more than 64 activities or a budget exceeded).
ExactResult exact_solve(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                        const ExactOptions& options = {});

struct DeterministicOptions {
  /// Enumerate and solve exactly while every aircraft has at most this many
  /// routes; otherwise column generation and diving without scenarios.
  long enumeration_limit = 20000;
  ColgenOptions colgen;
  DivingOptions diving;
};

struct DeterministicResult {
  Solution solution;
  double operational = 0.0;
  bool exact = false;  ///< solved by enumeration
  double lower_bound = 0.0;
};

/// Minimizes operational cost only. Throws InfeasibleError when no solution is
/// found.
DeterministicResult deterministic_solve(const Instance& instance, const Network& network,
                                        const DeterministicOptions& options = {});

/// Variables and rows of the compact formulation, for inspection.
struct CompactLayout {
  int arc_variables = 0;
  int delay_variables = 0;  ///< arrival delays, propagated delays, McCormick products
  int split_variables = 0;  ///< pieces of the cost linearization
};

/// Compact MILP: binary arc variables per aircraft with flow and partition
/// rows; per scenario, arrival delay = intrinsic + propagated, the propagated
/// delay bounded below by the McCormick linearization of arc * upstream
/// delay minus slack, and the delay cost split over its linear pieces. Delay
/// boxes come from a longest-path sweep of intrinsic delays, capped at 1e4.
MilpModel compact_milp(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                       CompactLayout* layout = nullptr);

/// Writes compact_milp as MPS. Throws Error when the file cannot be written.
void export_compact_milp(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                         const std::string& path);

/// Routes encoded by a solution vector of compact_milp.
Solution decode_compact_solution(const Instance& instance, const Network& network,
                                 const std::vector<double>& x);

}  // namespace tail
