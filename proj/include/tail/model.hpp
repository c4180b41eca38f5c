#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tail/pwl.hpp"

namespace tail {

enum class ActivityKind { leg, maintenance };

/// A flight leg or a maintenance slot. Times are minutes since the instance
/// epoch.
struct Activity {
  std::string id;
  ActivityKind kind = ActivityKind::leg;
  std::string origin;
  std::string destination;
  double departure = 0.0;
  double arrival = 0.0;
  double min_turn = 0.0;    ///< gates arc existence
  double sched_turn = 0.0;  ///< defines connection slack

  bool is_leg() const { return kind == ActivityKind::leg; }
};

/// Vertices are activity indices, then the source and the sink.
using Vertex = int;
/// Ordered activity indices of an aircraft route, without source and sink.
using Route = std::vector<int>;

struct Aircraft {
  std::string id;
  std::optional<int> first_activity;
  std::vector<int> maintenances;
  /// Operating cost of each activity for this aircraft; maintenances ignored.
  std::vector<double> leg_cost;
  /// Sparse connection costs keyed by arc_key(tail, head); others default.
  std::unordered_map<std::uint64_t, double> connection_cost;
  double default_connection_cost = 0.0;

  static std::uint64_t arc_key(Vertex tail, Vertex head) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(tail)) << 32) |
           static_cast<std::uint32_t>(head);
  }
  double connection(Vertex tail, Vertex head) const;
  double activity_cost(int activity) const;
};

struct Instance {
  std::vector<Activity> activities;
  std::vector<Aircraft> aircraft;
  std::vector<std::pair<int, int>> mandatory_connections;
  PwlFunction delay_cost;
  /// Charge delay cost on maintenance arrivals too (legs only by default).
  bool charge_maintenance_delay = false;
  /// Date that time zero refers to, ISO 8601.
  std::string epoch = "2025-01-01";

  int activity_count() const { return static_cast<int>(activities.size()); }
  Vertex source() const { return activity_count(); }
  Vertex sink() const { return activity_count() + 1; }
  int vertex_count() const { return activity_count() + 2; }
  bool is_activity(Vertex v) const { return v >= 0 && v < activity_count(); }
  bool is_leg(Vertex v) const { return is_activity(v) && activities[static_cast<std::size_t>(v)].is_leg(); }
  bool charges_delay(Vertex v) const {
    return is_activity(v) && (is_leg(v) || charge_maintenance_delay);
  }
  std::vector<int> legs() const;
  std::optional<int> find_activity(std::string_view id) const;
  std::optional<int> find_aircraft(std::string_view id) const;
  /// Human-readable vertex name, "source"/"sink" for the dummies.
  std::string vertex_name(Vertex v) const;

  /// Checks the activity, aircraft and mandatory-connection invariants.
  /// Throws InputError.
  void validate() const;
};

/// d_v - r_u - eta_v between two activities; +infinity when either end is a
/// dummy vertex.
double connection_slack(const Instance& instance, Vertex tail, Vertex head);

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;
  double slack = 0.0;
};

/// Directed acyclic graph of valid connections. Arc indices are stable and
/// arcs are sorted by (tail departure, head departure).
class ConnectionGraph {
 public:
  ConnectionGraph() = default;
  ConnectionGraph(int activity_count, std::vector<Arc> arcs,
                  std::vector<double> vertex_time);

  int vertex_count() const { return static_cast<int>(out_.size()); }
  Vertex source() const { return vertex_count() - 2; }
  Vertex sink() const { return vertex_count() - 1; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int index) const { return arcs_[static_cast<std::size_t>(index)]; }
  std::span<const int> out_arcs(Vertex v) const { return out_[static_cast<std::size_t>(v)]; }
  std::span<const int> in_arcs(Vertex v) const { return in_[static_cast<std::size_t>(v)]; }
  std::optional<int> find_arc(Vertex tail, Vertex head) const;
  /// Vertices sorted by scheduled departure; source first, sink last.
  const std::vector<Vertex>& topological_order() const { return order_; }
  /// Throws InputError if the arcs contain a cycle.
  void check_acyclic() const;

 private:
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<Vertex> order_;
};

/// Arc subset A^k of one aircraft with its own adjacency.
class Subgraph {
 public:
  Subgraph() = default;
  Subgraph(int aircraft, int vertex_count, std::vector<Arc> arcs,
           std::vector<Vertex> order);

  int aircraft() const { return aircraft_; }
  int vertex_count() const { return static_cast<int>(out_.size()); }
  Vertex source() const { return vertex_count() - 2; }
  Vertex sink() const { return vertex_count() - 1; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int index) const { return arcs_[static_cast<std::size_t>(index)]; }
  std::span<const int> out_arcs(Vertex v) const { return out_[static_cast<std::size_t>(v)]; }
  std::optional<int> find_arc(Vertex tail, Vertex head) const;
  const std::vector<Vertex>& topological_order() const { return order_; }
  bool contains_vertex(Vertex v) const;

  /// At least one source-sink path.
  bool has_route() const;
  /// True when `route` is a source-sink path of this subgraph.
  bool is_route(std::span<const int> route) const;

  /// Drops the flagged vertices with their arcs, then every arc that no
  /// longer lies on a source-sink path.
  Subgraph without_vertices(const std::vector<char>& removed) const;

 private:
  int aircraft_ = -1;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<Vertex> order_;
};

/// Connection graph: an arc (u, v) between activities iff the arrival airport
/// of u is the departure airport of v and r_u + rho_v <= d_v; plus (s, v),
/// (v, t) for every activity and (s, t). Throws InputError on duplicate ids.
ConnectionGraph build_graph(const Instance& instance);

/// Keeps only the mandatory out-arc of the first activity of each mandatory
/// connection. Throws InputError if a mandatory connection is not an arc.
ConnectionGraph apply_mandatory_connections(const ConnectionGraph& graph,
                                            const Instance& instance);

/// Arc subset of one aircraft. Removes arcs touching other aircraft's
/// maintenances or first activities, source arcs other than (s, first),
/// other arcs entering the first activity, and arcs that cannot lie on a
/// route visiting every mandatory maintenance. Throws InfeasibleError when
/// no source-sink path is left.
Subgraph build_subgraph(const ConnectionGraph& graph, const Instance& instance,
                        int aircraft);

struct Network {
  ConnectionGraph graph;
  std::vector<Subgraph> subgraphs;
};

/// build_graph, apply_mandatory_connections, then one subgraph per aircraft.
Network preprocess(const Instance& instance);

/// Sum of leg costs and connection costs along the route. Throws InputError
/// if the route is not a source-sink path of `subgraph`.
double route_operational_cost(const Instance& instance, const Subgraph& subgraph,
                              std::span<const int> route);

}  // namespace tail
