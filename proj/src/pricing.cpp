#include "tail/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace tail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double vertex_cost(const Instance& instance, const Aircraft& ac, Vertex v) {
  return instance.is_leg(v) ? ac.activity_cost(v) : 0.0;
}

double vertex_dual(const Instance& instance, std::span<const double> duals, Vertex v) {
  return instance.is_leg(v) ? duals[static_cast<std::size_t>(v)] : 0.0;
}

/// Cost added and delays produced when leaving `v` along `arc`.
double extend(const Instance& instance, const Aircraft& ac, const ScenarioSet& sc,
              std::span<const double> duals, Vertex v, const Arc& arc, const double* in, double* out) {
  double cost = vertex_cost(instance, ac, v) + ac.connection(v, arc.head) - vertex_dual(instance, duals, v);
  const int S = sc.size();
  const bool activity = instance.is_activity(v);
  const bool charged = instance.charges_delay(v);
  double delay_cost = 0.0;
  for (int s = 0; s < S; ++s) {
    double arrival = (activity ? sc.xi(s, v) : 0.0) + in[s];
    if (charged) delay_cost += instance.delay_cost(arrival);
    out[s] = std::max(arrival - arc.slack, 0.0);
  }
  if (S > 0) cost += delay_cost / S;
  return cost;
}

}  // namespace

ForwardLabel source_label(const Subgraph& subgraph, int scenarios) {
  return {subgraph.source(), 0.0, std::vector<double>(static_cast<std::size_t>(scenarios), 0.0)};
}

ForwardLabel forward_extend(const ForwardLabel& label, Vertex head, const Instance& instance,
                            const Subgraph& subgraph, const ScenarioSet& scenarios,
                            std::span<const double> duals) {
  auto a = subgraph.find_arc(label.at, head);
  if (!a) throw std::invalid_argument("forward_extend: arc not in the aircraft's subgraph");
  if (static_cast<int>(label.delay.size()) != scenarios.size())
    throw std::invalid_argument("forward_extend: label has the wrong number of scenarios");
  const auto& ac = instance.aircraft.at(static_cast<std::size_t>(subgraph.aircraft()));
  ForwardLabel out{head, 0.0, std::vector<double>(label.delay.size())};
  out.cost = label.cost + extend(instance, ac, scenarios, duals, label.at, subgraph.arc(*a),
                                 label.delay.data(), out.delay.data());
  return out;
}

bool dominates(const ForwardLabel& a, const ForwardLabel& b, double tol) {
  if (a.at != b.at) throw std::invalid_argument("dominates: labels at different vertices");
  if (a.delay.size() != b.delay.size()) throw std::invalid_argument("dominates: scenario mismatch");
  if (a.cost > b.cost + tol) return false;
  for (std::size_t s = 0; s < a.delay.size(); ++s)
    if (a.delay[s] > b.delay[s] + tol) return false;
  return true;
}

BackwardBounds compute_bounds(const Instance& instance, const Subgraph& subgraph,
                              const ScenarioSet& scenarios, std::span<const double> duals,
                              MeetMode mode) {
  const int n = subgraph.vertex_count();
  const int S = scenarios.size();
  const auto& ac = instance.aircraft.at(static_cast<std::size_t>(subgraph.aircraft()));
  BackwardBounds b;
  b.mode = mode;
  b.reachable.assign(static_cast<std::size_t>(n), 0);
  b.operational.assign(static_cast<std::size_t>(n), kInf);
  b.delay.resize(static_cast<std::size_t>(n));
  b.dual.assign(static_cast<std::size_t>(n), -kInf);

  const Vertex t = subgraph.sink();
  b.reachable[static_cast<std::size_t>(t)] = 1;
  b.operational[static_cast<std::size_t>(t)] = 0.0;
  b.delay[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(S), PwlFunction());

  const auto& order = subgraph.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Vertex v = *it;
    if (v == t) continue;
    const bool activity = instance.is_activity(v);
    const bool charged = instance.charges_delay(v);
    auto& acc = b.delay[static_cast<std::size_t>(v)];
    bool first = true;
    for (int a : subgraph.out_arcs(v)) {
      const Arc& arc = subgraph.arc(a);
      const Vertex w = arc.head;
      if (!b.reachable[static_cast<std::size_t>(w)]) continue;
      double op = b.operational[static_cast<std::size_t>(w)] + vertex_cost(instance, ac, v) +
                  ac.connection(v, w);
      auto& op_acc = b.operational[static_cast<std::size_t>(v)];
      op_acc = std::min(op_acc, op);
      if (first) acc.resize(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) {
        double xi = activity ? scenarios.xi(s, v) : 0.0;
        PwlFunction f = compose_prop(b.delay[static_cast<std::size_t>(w)][static_cast<std::size_t>(s)], 0.0, arc.slack - xi);
        if (charged) f = add(compose_affine(instance.delay_cost, xi), f);
        auto& slot = acc[static_cast<std::size_t>(s)];
        if (first)
          slot = std::move(f);
        else
          slot = mode == MeetMode::convex ? convex_meet(slot, f) : pointwise_min(slot, f);
      }
      first = false;
    }
    if (!first) b.reachable[static_cast<std::size_t>(v)] = 1;
  }
  for (const auto& fs : b.delay)
    for (const auto& f : fs) b.breakpoints += f.size();
  refresh_dual_bounds(b, instance, subgraph, duals);
  return b;
}

void refresh_dual_bounds(BackwardBounds& bounds, const Instance& instance,
                         const Subgraph& subgraph, std::span<const double> duals) {
  std::fill(bounds.dual.begin(), bounds.dual.end(), -kInf);
  const Vertex t = subgraph.sink();
  bounds.dual[static_cast<std::size_t>(t)] = 0.0;
  const auto& order = subgraph.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Vertex v = *it;
    if (v == t) continue;
    double best = -kInf;
    for (int a : subgraph.out_arcs(v)) best = std::max(best, bounds.dual[static_cast<std::size_t>(subgraph.arc(a).head)]);
    if (best > -kInf) bounds.dual[static_cast<std::size_t>(v)] = best + vertex_dual(instance, duals, v);
  }
}

namespace {

double bidirectional(const BackwardBounds& b, Vertex v, double cost, const double* delay, int S) {
  if (!b.reachable[static_cast<std::size_t>(v)] || b.dual[static_cast<std::size_t>(v)] == -kInf) return kInf;
  double value = cost + b.operational[static_cast<std::size_t>(v)] - b.dual[static_cast<std::size_t>(v)];
  if (S > 0) {
    double sum = 0.0;
    const auto& fs = b.delay[static_cast<std::size_t>(v)];
    for (int s = 0; s < S; ++s) sum += fs[static_cast<std::size_t>(s)](delay[s]);
    value += sum / S;
  }
  return value;
}

}  // namespace

double bidirectional_cost(const ForwardLabel& label, const BackwardBounds& bounds) {
  if (label.at < 0 || label.at >= static_cast<int>(bounds.reachable.size())) return kInf;
  return bidirectional(bounds, label.at, label.cost, label.delay.data(), static_cast<int>(label.delay.size()));
}

PricingResult solve_pricing(const Instance& instance, const Subgraph& subgraph,
                            const ScenarioSet& scenarios, std::span<const double> duals, double mu,
                            const BackwardBounds* bounds, double cutoff,
                            const PricingOptions& options) {
  PricingResult result;
  if (!subgraph.has_route()) {
    result.feasible = false;
    return result;
  }
  const bool use_bounds = options.use_bounds && bounds != nullptr;
  const int S = scenarios.size();
  const auto& ac = instance.aircraft.at(static_cast<std::size_t>(subgraph.aircraft()));
  const Vertex t = subgraph.sink();

  struct Node {
    Vertex at;
    double cost;
    int pred;
    int length;
    bool alive;
  };
  std::vector<Node> nodes;
  std::vector<double> pool;
  std::vector<std::vector<int>> front(static_cast<std::size_t>(subgraph.vertex_count()));
  using Key = std::tuple<double, int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;

  auto delays = [&](int idx) { return pool.data() + static_cast<std::size_t>(idx) * static_cast<std::size_t>(S); };
  auto trace = [&](const char* event, Vertex v, double cost, double bound) {
    if (options.trace)
      *options.trace << event << ',' << instance.vertex_name(v) << ',' << cost << ',' << bound << '\n';
  };

  double c_star = use_bounds ? cutoff + mu : kInf;
  struct Found {
    int pred;
    double cost;
  };
  std::vector<Found> found;

  nodes.push_back({subgraph.source(), 0.0, -1, 0, true});
  pool.assign(static_cast<std::size_t>(S), 0.0);
  front[static_cast<std::size_t>(subgraph.source())].push_back(0);
  queue.emplace(use_bounds ? bidirectional(*bounds, subgraph.source(), 0.0, pool.data(), S) : 0.0, 0, 0);
  ++result.stats.labels;

  std::vector<double> scratch(static_cast<std::size_t>(S));
  while (!queue.empty()) {
    auto [key, length, idx] = queue.top();
    queue.pop();
    if (!nodes[static_cast<std::size_t>(idx)].alive) continue;
    if (use_bounds && key >= c_star) {
      ++result.stats.bound_pruned;
      trace("pruned", nodes[static_cast<std::size_t>(idx)].at, nodes[static_cast<std::size_t>(idx)].cost, key);
      continue;
    }
    ++result.stats.popped;
    const Node node = nodes[static_cast<std::size_t>(idx)];
    for (int a : subgraph.out_arcs(node.at)) {
      const Arc& arc = subgraph.arc(a);
      const Vertex w = arc.head;
      double cost = node.cost + extend(instance, ac, scenarios, duals, node.at, arc, delays(idx), scratch.data());
      if (w == t) {
        if (cost < c_star) {
          c_star = cost;
          found.push_back({idx, cost});
        }
        continue;
      }
      double bound = cost;
      if (use_bounds) {
        bound = bidirectional(*bounds, w, cost, scratch.data(), S);
        if (bound >= c_star) {
          ++result.stats.bound_pruned;
          trace("pruned", w, cost, bound);
          continue;
        }
      }
      auto& at_w = front[static_cast<std::size_t>(w)];
      if (options.use_dominance) {
        bool dominated = false;
        for (int j : at_w) {
          const Node& other = nodes[static_cast<std::size_t>(j)];
          if (other.cost > cost + 1e-9) continue;
          const double* od = delays(j);
          bool all = true;
          for (int s = 0; s < S && all; ++s) all = od[s] <= scratch[static_cast<std::size_t>(s)] + 1e-9;
          if (all) {
            dominated = true;
            break;
          }
        }
        if (dominated) {
          ++result.stats.dominated;
          trace("dominated", w, cost, bound);
          continue;
        }
        auto removed = std::remove_if(at_w.begin(), at_w.end(), [&](int j) {
          Node& other = nodes[static_cast<std::size_t>(j)];
          if (cost > other.cost + 1e-9) return false;
          const double* od = delays(j);
          for (int s = 0; s < S; ++s)
            if (scratch[static_cast<std::size_t>(s)] > od[s] + 1e-9) return false;
          other.alive = false;
          ++result.stats.dominated;
          return true;
        });
        at_w.erase(removed, at_w.end());
      }
      int id = static_cast<int>(nodes.size());
      nodes.push_back({w, cost, idx, node.length + 1, true});
      pool.insert(pool.end(), scratch.begin(), scratch.end());
      if (options.use_dominance) at_w.push_back(id);
      queue.emplace(bound, node.length + 1, id);
      ++result.stats.labels;
      trace("created", w, cost, bound);
      if (options.label_limit > 0 && result.stats.labels >= options.label_limit) {
        result.stats.label_limit_hit = true;
        queue = {};
        break;
      }
    }
  }

  // Improving routes were found in decreasing cost order; the last is the best.
  std::sort(found.begin(), found.end(), [](const Found& x, const Found& y) { return x.cost < y.cost; });
  for (const Found& f : found) {
    if (static_cast<int>(result.routes.size()) >= options.max_columns) break;
    double rc = f.cost - mu;
    if (!(rc < cutoff)) break;
    PricedRoute pr;
    for (int j = f.pred; j >= 0; j = nodes[static_cast<std::size_t>(j)].pred)
      if (nodes[static_cast<std::size_t>(j)].at != subgraph.source()) pr.route.push_back(nodes[static_cast<std::size_t>(j)].at);
    std::reverse(pr.route.begin(), pr.route.end());
    pr.reduced_cost = rc;
    result.routes.push_back(std::move(pr));
  }
  return result;
}

}  // namespace tail
