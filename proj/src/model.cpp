#include "tail/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_set>

#include "tail/errors.hpp"

namespace tail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> vertex_times(const Instance& instance) {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(instance.vertex_count()));
  for (const auto& a : instance.activities) t.push_back(a.departure);
  t.push_back(-kInf);
  t.push_back(kInf);
  return t;
}

/// Keeps the arcs lying on some source-sink path.
std::vector<Arc> prune_dead_arcs(int vertex_count, const std::vector<Arc>& arcs) {
  const Vertex s = vertex_count - 2;
  const Vertex t = vertex_count - 1;
  std::vector<std::vector<int>> out(static_cast<std::size_t>(vertex_count));
  std::vector<std::vector<int>> in(static_cast<std::size_t>(vertex_count));
  for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
    out[static_cast<std::size_t>(arcs[static_cast<std::size_t>(i)].tail)].push_back(i);
    in[static_cast<std::size_t>(arcs[static_cast<std::size_t>(i)].head)].push_back(i);
  }
  auto sweep = [&](Vertex start, const std::vector<std::vector<int>>& adj, bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(vertex_count), 0);
    std::vector<Vertex> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (int a : adj[static_cast<std::size_t>(v)]) {
        const Arc& arc = arcs[static_cast<std::size_t>(a)];
        Vertex w = forward ? arc.head : arc.tail;
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    return seen;
  };
  auto from_source = sweep(s, out, true);
  auto to_sink = sweep(t, in, false);
  std::vector<Arc> kept;
  for (const Arc& a : arcs) {
    if (from_source[static_cast<std::size_t>(a.tail)] && to_sink[static_cast<std::size_t>(a.head)])
      kept.push_back(a);
  }
  return kept;
}

}  // namespace

double Aircraft::connection(Vertex tail, Vertex head) const {
  auto it = connection_cost.find(arc_key(tail, head));
  return it == connection_cost.end() ? default_connection_cost : it->second;
}

double Aircraft::activity_cost(int activity) const {
  return leg_cost[static_cast<std::size_t>(activity)];
}

std::vector<int> Instance::legs() const {
  std::vector<int> out;
  for (int v = 0; v < activity_count(); ++v)
    if (is_leg(v)) out.push_back(v);
  return out;
}

std::optional<int> Instance::find_activity(std::string_view id) const {
  for (int v = 0; v < activity_count(); ++v)
    if (activities[static_cast<std::size_t>(v)].id == id) return v;
  return std::nullopt;
}

std::optional<int> Instance::find_aircraft(std::string_view id) const {
  for (int k = 0; k < static_cast<int>(aircraft.size()); ++k)
    if (aircraft[static_cast<std::size_t>(k)].id == id) return k;
  return std::nullopt;
}

std::string Instance::vertex_name(Vertex v) const {
  if (v == source()) return "source";
  if (v == sink()) return "sink";
  return activities.at(static_cast<std::size_t>(v)).id;
}

void Instance::validate() const {
  std::unordered_set<std::string> ids;
  for (const auto& a : activities) {
    if (a.id.empty()) throw InputError("activity with empty id");
    if (!ids.insert(a.id).second) throw InputError("duplicate activity id " + a.id);
    if (!(a.departure < a.arrival))
      throw InputError("activity " + a.id + " departs at or after its arrival");
    if (a.kind == ActivityKind::maintenance && a.origin != a.destination)
      throw InputError("maintenance " + a.id + " changes airport");
    if (a.min_turn < 0 || a.sched_turn < 0)
      throw InputError("activity " + a.id + " has a negative turn time");
  }
  std::vector<int> owner(activities.size(), -1);
  std::unordered_set<std::string> tails;
  for (std::size_t k = 0; k < aircraft.size(); ++k) {
    const auto& ac = aircraft[k];
    if (!tails.insert(ac.id).second) throw InputError("duplicate aircraft id " + ac.id);
    if (ac.leg_cost.size() != activities.size())
      throw InputError("aircraft " + ac.id + " needs one cost per activity");
    if (ac.first_activity && !is_activity(*ac.first_activity))
      throw InputError("aircraft " + ac.id + " has an unknown first activity");
    for (int m : ac.maintenances) {
      if (!is_activity(m) || is_leg(m))
        throw InputError("aircraft " + ac.id + " lists a maintenance that is not one");
      if (owner[static_cast<std::size_t>(m)] != -1)
        throw InputError("maintenance " + activities[static_cast<std::size_t>(m)].id +
                         " assigned to two aircraft");
      owner[static_cast<std::size_t>(m)] = static_cast<int>(k);
    }
  }
  for (std::size_t k = 0; k < aircraft.size(); ++k) {
    const auto& first = aircraft[k].first_activity;
    if (!first) continue;
    for (std::size_t j = k + 1; j < aircraft.size(); ++j)
      if (aircraft[j].first_activity == first)
        throw InputError("aircraft " + aircraft[k].id + " and " + aircraft[j].id +
                         " share a first activity");
    if (!is_leg(*first) && owner[static_cast<std::size_t>(*first)] != static_cast<int>(k))
      throw InputError("first maintenance of " + aircraft[k].id + " is not its own");
  }
  for (int v = 0; v < activity_count(); ++v)
    if (!is_leg(v) && owner[static_cast<std::size_t>(v)] == -1)
      throw InputError("maintenance " + activities[static_cast<std::size_t>(v)].id +
                       " belongs to no aircraft");
  for (auto [u, v] : mandatory_connections)
    if (!is_activity(u) || !is_activity(v) || u == v)
      throw InputError("mandatory connection references unknown activities");
  if (!delay_cost.is_convex() || !delay_cost.is_nondecreasing())
    throw InputError("delay cost function must be convex and non-decreasing");
}

double connection_slack(const Instance& instance, Vertex tail, Vertex head) {
  if (!instance.is_activity(tail) || !instance.is_activity(head)) return kInf;
  const auto& u = instance.activities[static_cast<std::size_t>(tail)];
  const auto& v = instance.activities[static_cast<std::size_t>(head)];
  return v.departure - u.arrival - v.sched_turn;
}

ConnectionGraph::ConnectionGraph(int activity_count, std::vector<Arc> arcs,
                                 std::vector<double> vertex_time)
    : arcs_(std::move(arcs)),
      out_(static_cast<std::size_t>(activity_count + 2)),
      in_(static_cast<std::size_t>(activity_count + 2)) {
  std::stable_sort(arcs_.begin(), arcs_.end(), [&](const Arc& a, const Arc& b) {
    auto key = [&](const Arc& x) {
      return std::tuple(vertex_time[static_cast<std::size_t>(x.tail)],
                        vertex_time[static_cast<std::size_t>(x.head)], x.tail, x.head);
    };
    return key(a) < key(b);
  });
  for (int i = 0; i < static_cast<int>(arcs_.size()); ++i) {
    out_[static_cast<std::size_t>(arcs_[static_cast<std::size_t>(i)].tail)].push_back(i);
    in_[static_cast<std::size_t>(arcs_[static_cast<std::size_t>(i)].head)].push_back(i);
  }
  order_.resize(out_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](Vertex a, Vertex b) {
    return vertex_time[static_cast<std::size_t>(a)] < vertex_time[static_cast<std::size_t>(b)];
  });
}

std::optional<int> ConnectionGraph::find_arc(Vertex tail, Vertex head) const {
  if (tail < 0 || tail >= vertex_count()) return std::nullopt;
  for (int a : out_arcs(tail))
    if (arc(a).head == head) return a;
  return std::nullopt;
}

void ConnectionGraph::check_acyclic() const {
  std::vector<int> indegree(out_.size(), 0);
  for (const auto& a : arcs_) ++indegree[static_cast<std::size_t>(a.head)];
  std::vector<Vertex> ready;
  for (Vertex v = 0; v < vertex_count(); ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  int visited = 0;
  while (!ready.empty()) {
    Vertex v = ready.back();
    ready.pop_back();
    ++visited;
    for (int a : out_arcs(v))
      if (--indegree[static_cast<std::size_t>(arc(a).head)] == 0) ready.push_back(arc(a).head);
  }
  if (visited != vertex_count()) throw InputError("connection graph has a cycle");
}

Subgraph::Subgraph(int aircraft, int vertex_count, std::vector<Arc> arcs,
                   std::vector<Vertex> order)
    : aircraft_(aircraft),
      arcs_(std::move(arcs)),
      out_(static_cast<std::size_t>(vertex_count)),
      order_(std::move(order)) {
  for (int i = 0; i < static_cast<int>(arcs_.size()); ++i)
    out_[static_cast<std::size_t>(arcs_[static_cast<std::size_t>(i)].tail)].push_back(i);
}

std::optional<int> Subgraph::find_arc(Vertex tail, Vertex head) const {
  if (tail < 0 || tail >= vertex_count()) return std::nullopt;
  for (int a : out_arcs(tail))
    if (arc(a).head == head) return a;
  return std::nullopt;
}

bool Subgraph::contains_vertex(Vertex v) const {
  if (v == source() || v == sink()) return true;
  if (!out_arcs(v).empty()) return true;
  return false;
}

bool Subgraph::has_route() const {
  std::vector<char> seen(out_.size(), 0);
  std::vector<Vertex> stack{source()};
  seen[static_cast<std::size_t>(source())] = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (v == sink()) return true;
    for (int a : out_arcs(v)) {
      Vertex w = arc(a).head;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  return false;
}

bool Subgraph::is_route(std::span<const int> route) const {
  Vertex prev = source();
  for (int v : route) {
    if (v < 0 || v >= source() || !find_arc(prev, v)) return false;
    prev = v;
  }
  return find_arc(prev, sink()).has_value();
}

Subgraph Subgraph::without_vertices(const std::vector<char>& removed) const {
  std::vector<Arc> kept;
  for (const Arc& a : arcs_) {
    bool drop = (static_cast<std::size_t>(a.tail) < removed.size() && removed[static_cast<std::size_t>(a.tail)]) ||
                (static_cast<std::size_t>(a.head) < removed.size() && removed[static_cast<std::size_t>(a.head)]);
    if (!drop) kept.push_back(a);
  }
  return Subgraph(aircraft_, vertex_count(), prune_dead_arcs(vertex_count(), kept), order_);
}

ConnectionGraph build_graph(const Instance& instance) {
  std::unordered_set<std::string> ids;
  for (const auto& a : instance.activities)
    if (!ids.insert(a.id).second) throw InputError("duplicate activity id " + a.id);

  const int n = instance.activity_count();
  std::vector<Arc> arcs;
  for (int u = 0; u < n; ++u) {
    const auto& from = instance.activities[static_cast<std::size_t>(u)];
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const auto& to = instance.activities[static_cast<std::size_t>(v)];
      if (from.destination == to.origin && from.arrival + to.min_turn <= to.departure)
        arcs.push_back({u, v, connection_slack(instance, u, v)});
    }
  }
  for (int v = 0; v < n; ++v) {
    arcs.push_back({instance.source(), v, kInf});
    arcs.push_back({v, instance.sink(), kInf});
  }
  arcs.push_back({instance.source(), instance.sink(), kInf});
  return ConnectionGraph(n, std::move(arcs), vertex_times(instance));
}

ConnectionGraph apply_mandatory_connections(const ConnectionGraph& graph,
                                            const Instance& instance) {
  std::vector<int> forced(static_cast<std::size_t>(graph.vertex_count()), -1);
  for (auto [u, v] : instance.mandatory_connections) {
    if (!graph.find_arc(u, v))
      throw InputError("mandatory connection " + instance.vertex_name(u) + " -> " +
                       instance.vertex_name(v) + " is not a valid connection");
    if (forced[static_cast<std::size_t>(u)] != -1 && forced[static_cast<std::size_t>(u)] != v)
      throw InputError("activity " + instance.vertex_name(u) +
                       " has two mandatory successors");
    forced[static_cast<std::size_t>(u)] = v;
  }
  std::vector<Arc> kept;
  for (const Arc& a : graph.arcs()) {
    int f = forced[static_cast<std::size_t>(a.tail)];
    if (f == -1 || f == a.head) kept.push_back(a);
  }
  return ConnectionGraph(graph.vertex_count() - 2, std::move(kept), vertex_times(instance));
}

Subgraph build_subgraph(const ConnectionGraph& graph, const Instance& instance,
                        int aircraft) {
  const auto& ac = instance.aircraft.at(static_cast<std::size_t>(aircraft));
  const Vertex s = graph.source();
  const Vertex t = graph.sink();
  std::vector<char> foreign(static_cast<std::size_t>(graph.vertex_count()), 0);
  for (std::size_t j = 0; j < instance.aircraft.size(); ++j) {
    if (static_cast<int>(j) == aircraft) continue;
    for (int m : instance.aircraft[j].maintenances) foreign[static_cast<std::size_t>(m)] = 1;
    if (auto f = instance.aircraft[j].first_activity) foreign[static_cast<std::size_t>(*f)] = 1;
  }
  auto departure = [&](Vertex v) {
    if (v == s) return -kInf;
    if (v == t) return kInf;
    return instance.activities[static_cast<std::size_t>(v)].departure;
  };
  auto arrival = [&](Vertex v) {
    if (v == s) return -kInf;
    if (v == t) return kInf;
    return instance.activities[static_cast<std::size_t>(v)].arrival;
  };

  std::vector<Arc> kept;
  for (const Arc& a : graph.arcs()) {
    if (foreign[static_cast<std::size_t>(a.tail)] || foreign[static_cast<std::size_t>(a.head)])
      continue;
    if (ac.first_activity) {
      if (a.tail == s && a.head != *ac.first_activity) continue;
      if (a.head == *ac.first_activity && a.tail != s) continue;
    }
    // m can precede u only if r_m <= d_u; m can follow v only if r_v <= d_m.
    bool bypass = false;
    for (int m : ac.maintenances) {
      if (a.tail == m || a.head == m) continue;
      const auto& mt = instance.activities[static_cast<std::size_t>(m)];
      if (mt.arrival > departure(a.tail) && arrival(a.head) > mt.departure) {
        bypass = true;
        break;
      }
    }
    if (!bypass) kept.push_back(a);
  }
  Subgraph sub(aircraft, graph.vertex_count(), prune_dead_arcs(graph.vertex_count(), kept),
               graph.topological_order());
  if (!sub.has_route())
    throw InfeasibleError("aircraft " + ac.id + " has no feasible route");
  return sub;
}

Network preprocess(const Instance& instance) {
  instance.validate();
  Network net;
  net.graph = apply_mandatory_connections(build_graph(instance), instance);
  net.graph.check_acyclic();
  for (int k = 0; k < static_cast<int>(instance.aircraft.size()); ++k)
    net.subgraphs.push_back(build_subgraph(net.graph, instance, k));
  return net;
}

double route_operational_cost(const Instance& instance, const Subgraph& subgraph,
                              std::span<const int> route) {
  if (!subgraph.is_route(route))
    throw InputError("route is not a path of the aircraft's connection subgraph");
  const auto& ac = instance.aircraft.at(static_cast<std::size_t>(subgraph.aircraft()));
  double cost = 0.0;
  Vertex prev = instance.source();
  for (int v : route) {
    if (instance.is_leg(v)) cost += ac.activity_cost(v);
    cost += ac.connection(prev, v);
    prev = v;
  }
  cost += ac.connection(prev, instance.sink());
  return cost;
}

}  // namespace tail
