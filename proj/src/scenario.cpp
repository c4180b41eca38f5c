#include "tail/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tail/errors.hpp"

namespace tail {

ScenarioSet::ScenarioSet(int activity_count, std::vector<double> departure,
                         std::vector<double> arrival)
    : activities_(activity_count), dep_(std::move(departure)), arr_(std::move(arrival)) {
  if (activity_count < 0 || dep_.size() != arr_.size())
    throw InputError("scenario departure and arrival tables differ in size");
  if (activity_count == 0) {
    if (!dep_.empty()) throw InputError("scenario data for an instance without activities");
    count_ = 0;
  } else {
    if (dep_.size() % static_cast<std::size_t>(activity_count) != 0)
      throw InputError("scenario table is not a multiple of the activity count");
    count_ = static_cast<int>(dep_.size() / static_cast<std::size_t>(activity_count));
  }
  xi_.resize(dep_.size());
  for (std::size_t i = 0; i < dep_.size(); ++i) {
    if (!(dep_[i] >= 0.0) || !std::isfinite(dep_[i]) || !std::isfinite(arr_[i]))
      throw InputError("departure delays must be finite and non-negative");
    xi_[i] = dep_[i] + arr_[i];
  }
}

ScenarioSet ScenarioSet::zeros(int activity_count, int count) {
  std::size_t n = static_cast<std::size_t>(activity_count) * static_cast<std::size_t>(count);
  return ScenarioSet(activity_count, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
}

ScenarioSet ScenarioSet::head(int count) const {
  count = std::clamp(count, 0, count_);
  std::size_t n = static_cast<std::size_t>(count) * static_cast<std::size_t>(activities_);
  return ScenarioSet(activities_, {dep_.begin(), dep_.begin() + static_cast<std::ptrdiff_t>(n)},
                     {arr_.begin(), arr_.begin() + static_cast<std::ptrdiff_t>(n)});
}

namespace {

void check_coverage(const Instance& instance, const ScenarioSet& scenarios) {
  if (!scenarios.empty() && scenarios.activity_count() != instance.activity_count())
    throw InputError("scenario set does not match the instance's activities");
}

}  // namespace

RouteDelays propagate_route(const Instance& instance, std::span<const int> route,
                            const ScenarioSet& scenarios) {
  check_coverage(instance, scenarios);
  RouteDelays out;
  out.scenarios = scenarios.size();
  out.length = static_cast<int>(route.size());
  out.departure.resize(static_cast<std::size_t>(out.scenarios * out.length));
  out.arrival.resize(out.departure.size());
  for (int s = 0; s < out.scenarios; ++s) {
    double prev_arrival = 0.0;
    for (int i = 0; i < out.length; ++i) {
      int v = route[static_cast<std::size_t>(i)];
      double propagated = 0.0;
      if (i > 0) {
        double slack = connection_slack(instance, route[static_cast<std::size_t>(i - 1)], v);
        propagated = std::max(prev_arrival - slack, 0.0);
      }
      double dep = scenarios.departure(s, v) + propagated;
      double arr = dep + scenarios.arrival(s, v);
      out.departure[static_cast<std::size_t>(s * out.length + i)] = dep;
      out.arrival[static_cast<std::size_t>(s * out.length + i)] = arr;
      prev_arrival = arr;
    }
  }
  return out;
}

double route_delay_cost(const Instance& instance, std::span<const int> route,
                        const ScenarioSet& scenarios) {
  if (scenarios.empty()) return 0.0;
  auto delays = propagate_route(instance, route, scenarios);
  double total = 0.0;
  for (int s = 0; s < delays.scenarios; ++s)
    for (int i = 0; i < delays.length; ++i)
      if (instance.charges_delay(route[static_cast<std::size_t>(i)]))
        total += instance.delay_cost(delays.arr(s, i));
  return total / scenarios.size();
}

void validate_solution(const Instance& instance, const Network& network,
                       const Solution& solution) {
  if (solution.routes.size() != instance.aircraft.size())
    throw InputError("solution needs exactly one route per aircraft");
  std::vector<int> seen(static_cast<std::size_t>(instance.activity_count()), 0);
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    const auto& route = solution.routes[k];
    for (int v : route) {
      if (!instance.is_activity(v))
        throw InputError("route of " + instance.aircraft[k].id + " names an unknown activity");
      ++seen[static_cast<std::size_t>(v)];
    }
    if (!network.subgraphs[k].is_route(route))
      throw InputError("route of " + instance.aircraft[k].id + " is not feasible for it");
  }
  std::vector<std::string> missing, repeated;
  for (int v = 0; v < instance.activity_count(); ++v) {
    int c = seen[static_cast<std::size_t>(v)];
    if (c > 1) repeated.push_back(instance.vertex_name(v));
    if (c == 0 && instance.is_leg(v)) missing.push_back(instance.vertex_name(v));
  }
  if (missing.empty() && repeated.empty()) return;
  std::ostringstream os;
  os << "routes do not partition the legs";
  auto list = [&](const char* what, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    os << "; " << what << ":";
    for (const auto& id : ids) os << ' ' << id;
  };
  list("uncovered", missing);
  list("covered more than once", repeated);
  throw InputError(os.str());
}

CostBreakdown solution_cost(const Instance& instance, const Network& network,
                            const Solution& solution, const ScenarioSet& scenarios) {
  validate_solution(instance, network, solution);
  check_coverage(instance, scenarios);
  CostBreakdown out;
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    out.operational += route_operational_cost(instance, network.subgraphs[k], solution.routes[k]);
    out.delay += route_delay_cost(instance, solution.routes[k], scenarios);
  }
  out.total = out.operational + out.delay;
  return out;
}

double route_cost(const Instance& instance, const Subgraph& subgraph, std::span<const int> route,
                  const ScenarioSet& scenarios) {
  return route_operational_cost(instance, subgraph, route) +
         route_delay_cost(instance, route, scenarios);
}

}  // namespace tail
