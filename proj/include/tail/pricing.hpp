#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tail/model.hpp"
#include "tail/pwl.hpp"
#include "tail/scenario.hpp"

namespace tail {

/// State of a partial source-v path: reduced cost so far (costs of v itself
/// not yet paid) and the delay propagated into v in each scenario.
struct ForwardLabel {
  Vertex at = 0;
  double cost = 0.0;
  std::vector<double> delay;
};

/// Label of the empty path at the source.
ForwardLabel source_label(const Subgraph& subgraph, int scenarios);

/// Extends along (label.at, head): adds the activity cost of label.at, the
/// connection cost, the mean delay cost of label.at and subtracts its dual;
/// propagates delays through the connection slack. Throws
/// std::invalid_argument when the arc is not in the subgraph.
ForwardLabel forward_extend(const ForwardLabel& label, Vertex head, const Instance& instance,
                            const Subgraph& subgraph, const ScenarioSet& scenarios,
                            std::span<const double> duals);

/// Componentwise order on (cost, delays) with `tol` slack. Throws
/// std::invalid_argument for labels at different vertices.
bool dominates(const ForwardLabel& a, const ForwardLabel& b, double tol = 1e-9);

enum class MeetMode { convex, exact };

/// Lower bounds on the completion of any v-sink path: operational cost,
/// per-scenario delay cost as a function of the incoming propagated delay,
/// and an upper bound on the collected duals.
struct BackwardBounds {
  std::vector<char> reachable;  ///< vertex has a path to the sink
  std::vector<double> operational;
  std::vector<std::vector<PwlFunction>> delay;  ///< [vertex][scenario]
  std::vector<double> dual;
  MeetMode mode = MeetMode::convex;
  std::size_t breakpoints = 0;  ///< total over all functions
};

/// Reverse topological sweep over the subgraph. `duals` holds one value per
/// activity (zero for maintenances).
BackwardBounds compute_bounds(const Instance& instance, const Subgraph& subgraph,
                              const ScenarioSet& scenarios, std::span<const double> duals,
                              MeetMode mode = MeetMode::convex);

/// Recomputes only the dual component, on `subgraph` (which may be a pruned
/// version of the one the bounds were computed on).
void refresh_dual_bounds(BackwardBounds& bounds, const Instance& instance,
                         const Subgraph& subgraph, std::span<const double> duals);

/// C + bound cost + mean_s f_s(D_s) - dual bound at the label's vertex;
/// +infinity when the vertex cannot reach the sink.
double bidirectional_cost(const ForwardLabel& label, const BackwardBounds& bounds);

struct PricingOptions {
  bool use_dominance = true;
  bool use_bounds = true;
  /// Return at most this many improving routes (the best first).
  int max_columns = 1;
  /// Abort after this many labels (0: unlimited).
  long label_limit = 0;
  /// CSV lines "event,vertex,cost,bound" for created, dominated and pruned labels.
  std::ostream* trace = nullptr;
};

struct PricedRoute {
  Route route;
  double reduced_cost = 0.0;  ///< c - sum of leg duals - mu
};

struct PricingStats {
  long labels = 0;
  long dominated = 0;
  long bound_pruned = 0;
  long popped = 0;
  bool label_limit_hit = false;
};

struct PricingResult {
  bool feasible = true;  ///< false when the subgraph has no source-sink path
  std::vector<PricedRoute> routes;
  PricingStats stats;
};

/// Minimizes c_r - sum_{l in r} lambda_l - mu over source-sink paths of the
/// subgraph, keeping only routes whose reduced cost is below `cutoff`. Labels
/// are expanded in order of (bidirectional cost, path length, creation).
/// `bounds` may be null when options.use_bounds is false.
PricingResult solve_pricing(const Instance& instance, const Subgraph& subgraph,
                            const ScenarioSet& scenarios, std::span<const double> duals, double mu,
                            const BackwardBounds* bounds, double cutoff,
                            const PricingOptions& options = {});

}  // namespace tail
