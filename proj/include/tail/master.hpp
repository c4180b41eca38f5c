#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tail/lp.hpp"
#include "tail/model.hpp"
#include "tail/pricing.hpp"
#include "tail/scenario.hpp"

namespace tail {

/// A route of one aircraft with its costs under the scenario set in use.
struct Column {
  int aircraft = 0;
  Route route;
  double operational = 0.0;
  double delay = 0.0;
  double cost = 0.0;
};

/// FNV-1a hash of the activity indices of a route.
std::uint64_t route_hash(std::span<const int> route);

/// Builds a column, computing its costs. Throws InputError if the route is not
/// a path of the subgraph.
Column make_column(const Instance& instance, const Subgraph& subgraph, const ScenarioSet& scenarios,
                   Route route);

/// Deduplicated store of every column generated so far.
class ColumnPool {
 public:
  int size() const { return static_cast<int>(columns_.size()); }
  const Column& operator[](int i) const { return columns_[static_cast<std::size_t>(i)]; }
  const std::vector<Column>& columns() const { return columns_; }
  /// Index of an equal (aircraft, route) column if present.
  std::optional<int> find(int aircraft, std::span<const int> route) const;
  /// Returns the index and whether the column is new.
  std::pair<int, bool> add(Column column);

 private:
  std::vector<Column> columns_;
  std::unordered_multimap<std::uint64_t, int> index_;
};

/// The problem left at a node of a dive: aircraft still free, legs still to
/// cover, and subgraphs without the activities already flown.
struct Residual {
  std::vector<char> aircraft;  ///< free aircraft
  std::vector<char> legs;      ///< indexed by activity; 1 for uncovered legs
  std::vector<Subgraph> subgraphs;

  static Residual root(const Instance& instance, const Network& network);
  /// Fixes `column`: its aircraft leaves, its activities are removed from the
  /// other subgraphs.
  Residual fix(const Instance& instance, const Column& column) const;
  bool column_fits(const Column& column) const;
  /// Every free aircraft still has a route.
  bool routable() const;
  int free_aircraft() const;
  int open_legs() const;
};

struct RmpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> y;             ///< one per entry of the column list
  std::vector<double> leg_duals;     ///< per activity, zero outside the residual legs
  std::vector<double> aircraft_duals;  ///< per aircraft, zero for fixed aircraft
  double artificial = 0.0;           ///< total value of artificial columns
  std::vector<int> basis;
  int iterations = 0;
};

/// LP relaxation of the set-partitioning master restricted to `columns` (pool
/// indices): one equality row per open leg, one equality convexity row per
/// free aircraft and, when `artificial_cost` > 0, one artificial column per
/// row at that cost. Artificials come first in the LP column order, so a
/// basis stays reusable when columns are appended.
RmpSolution solve_rmp_lp(const ColumnPool& pool, std::span<const int> columns, const Residual& residual,
                         double artificial_cost, std::span<const int> warm_basis = {});

struct ColgenOptions {
  MeetMode meet = MeetMode::convex;
  bool use_dominance = true;
  bool use_bounds = true;
  /// Improving routes returned per aircraft and pricing round.
  int columns_per_pricing = 5;
  int max_iterations = 100000;
  /// Wall-clock seconds; <= 0 disables.
  double time_limit = 3600.0;
  int threads = 1;
  double admit_tolerance = 1e-6;
  /// Artificial columns above this total mark the residual infeasible.
  double artificial_tolerance = 1e-6;
  /// CSV "iteration,lp_value,columns_added,pricing_seconds".
  std::ostream* log = nullptr;
};

struct MasterState {
  std::vector<int> columns;  ///< pool indices in the LP
  std::vector<double> y;
  std::vector<double> leg_duals;
  std::vector<double> aircraft_duals;
  double lp_value = 0.0;
  /// Lagrangian bound: LP value plus the most negative reduced cost of each
  /// free aircraft; equals lp_value at convergence.
  double lower_bound = 0.0;
  double artificial = 0.0;
  int iterations = 0;
  long columns_added = 0;
  /// Columns priced as improving whose recomputed reduced cost was not.
  long rejected = 0;
  bool converged = false;
  bool feasible = false;  ///< LP solved with artificials at zero
  bool limit_hit = false;
  std::vector<int> basis;
};

/// Column generation over a shared pool. Backward bounds are computed once per
/// aircraft on the root subgraphs; only their dual part is refreshed. The
/// master starts with artificial columns and drops them as soon as they are
/// all zero, so later duals are free of the artificial cost.
class ColumnGeneration {
 public:
  ColumnGeneration(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                   ColgenOptions options = {});

  const Instance& instance() const { return *instance_; }
  const Network& network() const { return *network_; }
  const ScenarioSet& scenarios() const { return *scenarios_; }
  const ColgenOptions& options() const { return options_; }
  ColumnPool& pool() { return pool_; }
  const ColumnPool& pool() const { return pool_; }

  /// Adds a route as a column (validated against the root subgraph).
  int add_route(int aircraft, Route route);

  /// Cost of artificial columns: 1e6 times the largest column cost in the
  /// pool when first needed (an operational upper bound if the pool is empty).
  double artificial_cost();

  /// Runs the loop on `residual` starting from every pool column that fits
  /// it. `deadline` is a steady-clock time in seconds (<= 0: from options).
  MasterState run(const Residual& residual, double deadline = 0.0);

  /// Minimum reduced cost per free aircraft under the given duals (+inf for
  /// fixed aircraft), computed by pricing without a cutoff.
  std::vector<double> min_reduced_costs(const Residual& residual, std::span<const double> leg_duals,
                                        std::span<const double> aircraft_duals);

 private:
  const BackwardBounds& bounds(int aircraft);

  const Instance* instance_;
  const Network* network_;
  const ScenarioSet* scenarios_;
  ColgenOptions options_;
  ColumnPool pool_;
  std::vector<std::optional<BackwardBounds>> bounds_;
  double artificial_cost_ = 0.0;
};

/// Seconds on the steady clock.
double steady_seconds();

}  // namespace tail
