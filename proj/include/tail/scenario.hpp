#pragma once

#include <span>
#include <vector>

#include "tail/model.hpp"

namespace tail {

/// Intrinsic delays per (scenario, activity), in minutes. Departure delays are
/// non-negative; arrival delays may be negative (early arrivals).
class ScenarioSet {
 public:
  ScenarioSet() = default;
  /// Row-major [scenario][activity]. Throws InputError on shape mismatch or a
  /// negative departure delay.
  ScenarioSet(int activity_count, std::vector<double> departure, std::vector<double> arrival);

  static ScenarioSet zeros(int activity_count, int count);

  int size() const { return count_; }
  bool empty() const { return count_ == 0; }
  int activity_count() const { return activities_; }
  double departure(int s, int v) const { return dep_[index(s, v)]; }
  double arrival(int s, int v) const { return arr_[index(s, v)]; }
  /// Total intrinsic delay of v in scenario s.
  double xi(int s, int v) const { return xi_[index(s, v)]; }
  /// xi of every activity in scenario s.
  std::span<const double> xi_row(int s) const {
    return {xi_.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(activities_),
            static_cast<std::size_t>(activities_)};
  }
  const std::vector<double>& departures() const { return dep_; }
  const std::vector<double>& arrivals() const { return arr_; }

  /// The first `count` scenarios.
  ScenarioSet head(int count) const;

 private:
  std::size_t index(int s, int v) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(activities_) +
           static_cast<std::size_t>(v);
  }
  int activities_ = 0;
  int count_ = 0;
  std::vector<double> dep_, arr_, xi_;
};

/// Departure and arrival delays of each activity of a route, per scenario.
struct RouteDelays {
  int scenarios = 0;
  int length = 0;
  std::vector<double> departure;  ///< [scenario][position]
  std::vector<double> arrival;

  double dep(int s, int i) const { return departure[static_cast<std::size_t>(s * length + i)]; }
  double arr(int s, int i) const { return arrival[static_cast<std::size_t>(s * length + i)]; }
};

/// Walks the route: the first activity departs with its intrinsic delay; each
/// successor v of u departs with eps_dep(v) + max(arr(u) - slack(u, v), 0);
/// arrival delay is departure delay plus eps_arr. Throws InputError when the
/// scenario set does not cover the instance.
RouteDelays propagate_route(const Instance& instance, std::span<const int> route,
                            const ScenarioSet& scenarios);

/// Mean over scenarios of the delay cost of the route's arrivals (legs only
/// unless the instance charges maintenances). Zero for an empty scenario set.
double route_delay_cost(const Instance& instance, std::span<const int> route,
                        const ScenarioSet& scenarios);

/// One route per aircraft, indexed like Instance::aircraft.
struct Solution {
  std::vector<Route> routes;
};

struct CostBreakdown {
  double operational = 0.0;
  double delay = 0.0;
  double total = 0.0;
};

/// Throws InputError unless every route is a path of its aircraft's subgraph
/// and the routes cover every leg exactly once. The message names the
/// offending legs.
void validate_solution(const Instance& instance, const Network& network, const Solution& solution);

/// Validates, then sums operational and delay costs over all routes.
CostBreakdown solution_cost(const Instance& instance, const Network& network,
                            const Solution& solution, const ScenarioSet& scenarios);

/// Operational plus delay cost of a single route.
double route_cost(const Instance& instance, const Subgraph& subgraph, std::span<const int> route,
                  const ScenarioSet& scenarios);

}  // namespace tail
