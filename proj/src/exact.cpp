#include "tail/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "tail/errors.hpp"

namespace tail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<Route> enumerate_routes(const Subgraph& g, long limit) {
  std::vector<Route> out;
  Route cur;
  std::function<void(Vertex)> walk = [&](Vertex u) {
    for (int a : g.out_arcs(u)) {
      Vertex w = g.arc(a).head;
      if (w == g.sink()) {
        if (static_cast<long>(out.size()) >= limit)
          throw LimitError("more than " + std::to_string(limit) + " routes for one aircraft");
        out.push_back(cur);
        continue;
      }
      cur.push_back(w);
      walk(w);
      cur.pop_back();
    }
  };
  walk(g.source());
  return out;
}

ExactResult exact_solve(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                        const ExactOptions& options) {
  const int n = instance.activity_count();
  const int K = static_cast<int>(instance.aircraft.size());
  if (n > 64) throw LimitError("exact search supports at most 64 activities");
  std::uint64_t all_legs = 0;
  for (int v = 0; v < n; ++v)
    if (instance.is_leg(v)) all_legs |= std::uint64_t{1} << v;

  struct Option {
    double cost;
    std::uint64_t legs;
    int route;
  };
  std::vector<std::vector<Route>> routes(static_cast<std::size_t>(K));
  std::vector<std::vector<Option>> opts(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const Subgraph& g = network.subgraphs[static_cast<std::size_t>(k)];
    routes[static_cast<std::size_t>(k)] = enumerate_routes(g, options.route_limit);
    const auto& rs = routes[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < rs.size(); ++i) {
      std::uint64_t mask = 0;
      for (int v : rs[i])
        if (instance.is_leg(v)) mask |= std::uint64_t{1} << v;
      opts[static_cast<std::size_t>(k)].push_back({route_cost(instance, g, rs[i], scenarios), mask, static_cast<int>(i)});
    }
    std::stable_sort(opts[static_cast<std::size_t>(k)].begin(), opts[static_cast<std::size_t>(k)].end(),
                     [](const Option& a, const Option& b) { return a.cost < b.cost; });
  }

  ExactResult result;
  if (K == 0) {
    if (all_legs) throw InfeasibleError("no aircraft to fly the legs");
    result.cost = solution_cost(instance, network, result.solution, scenarios);
    return result;
  }

  // Search order: fewest routes first; the aircraft with most routes is matched last.
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return opts[static_cast<std::size_t>(a)].size() < opts[static_cast<std::size_t>(b)].size();
  });
  const int last = order.back();
  std::unordered_map<std::uint64_t, int> last_table;  // legs -> cheapest option index
  for (std::size_t i = 0; i < opts[static_cast<std::size_t>(last)].size(); ++i)
    last_table.emplace(opts[static_cast<std::size_t>(last)][i].legs, static_cast<int>(i));
  std::vector<double> rest(static_cast<std::size_t>(K) + 1, 0.0);
  for (int i = K - 1; i >= 0; --i) {
    const auto& o = opts[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    rest[static_cast<std::size_t>(i)] = rest[static_cast<std::size_t>(i) + 1] + (o.empty() ? kInf : o.front().cost);
  }

  double best = kInf;
  std::vector<int> choice(static_cast<std::size_t>(K), -1), best_choice;
  std::function<void(int, std::uint64_t, double)> search = [&](int depth, std::uint64_t used, double cost) {
    if (++result.nodes > options.node_limit) throw LimitError("exact search node budget exhausted");
    if (depth == K - 1) {
      auto it = last_table.find(all_legs & ~used);
      if (it == last_table.end()) return;
      double total = cost + opts[static_cast<std::size_t>(last)][static_cast<std::size_t>(it->second)].cost;
      if (total < best) {
        best = total;
        choice[static_cast<std::size_t>(last)] = it->second;
        best_choice = choice;
      }
      return;
    }
    int k = order[static_cast<std::size_t>(depth)];
    for (std::size_t i = 0; i < opts[static_cast<std::size_t>(k)].size(); ++i) {
      const Option& o = opts[static_cast<std::size_t>(k)][i];
      if (cost + o.cost + rest[static_cast<std::size_t>(depth) + 1] >= best) break;
      if (o.legs & used) continue;
      choice[static_cast<std::size_t>(k)] = static_cast<int>(i);
      search(depth + 1, used | o.legs, cost + o.cost);
    }
  };
  search(0, 0, 0.0);
  if (best == kInf) throw InfeasibleError("no partition of the legs into aircraft routes");
  result.solution.routes.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const Option& o = opts[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_choice[static_cast<std::size_t>(k)])];
    result.solution.routes[static_cast<std::size_t>(k)] = routes[static_cast<std::size_t>(k)][static_cast<std::size_t>(o.route)];
  }
  result.cost = solution_cost(instance, network, result.solution, scenarios);
  return result;
}

DeterministicResult deterministic_solve(const Instance& instance, const Network& network,
                                        const DeterministicOptions& options) {
  const ScenarioSet none;
  DeterministicResult out;
  bool small = instance.activity_count() <= 64;
  if (small) {
    try {
      for (const auto& g : network.subgraphs) enumerate_routes(g, options.enumeration_limit);
    } catch (const LimitError&) {
      small = false;
    }
  }
  if (small) {
    auto ex = exact_solve(instance, network, none);
    out.solution = std::move(ex.solution);
    out.operational = ex.cost.operational;
    out.exact = true;
    out.lower_bound = out.operational;
    return out;
  }
  ColumnGeneration cg(instance, network, none, options.colgen);
  auto dive = diving(cg, options.diving);
  out.lower_bound = dive.root_bound;
  std::optional<IntegerSolution> found = dive.best;
  if (!found) {
    RmhOptions ro;
    ro.time_limit = options.diving.time_limit;
    found = restricted_master_heuristic(cg, ro).best;
  }
  if (!found) throw InfeasibleError("no deterministic solution found");
  out.solution = std::move(found->solution);
  out.operational = found->cost.operational;
  return out;
}

namespace {

std::string short_name(char prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%07d", prefix, index);
  return buf;
}

}  // namespace

MilpModel compact_milp(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                       CompactLayout* layout) {
  const int n = instance.activity_count();
  const int K = static_cast<int>(instance.aircraft.size());
  const int S = scenarios.size();
  MilpModel m;
  m.name = "TAIL";
  int rows = 0;
  auto row = [&](char sense, double rhs) { return m.add_row(short_name('R', rows++), sense, rhs); };
  CompactLayout lay;

  // Arc variables, indexed [k][arc of subgraph k].
  std::vector<std::vector<int>> z(static_cast<std::size_t>(K));
  int zc = 0;
  for (int k = 0; k < K; ++k) {
    const Subgraph& g = network.subgraphs[static_cast<std::size_t>(k)];
    const Aircraft& ac = instance.aircraft[static_cast<std::size_t>(k)];
    for (const Arc& a : g.arcs()) {
      double cost = ac.connection(a.tail, a.head) + (instance.is_leg(a.head) ? ac.activity_cost(a.head) : 0.0);
      z[static_cast<std::size_t>(k)].push_back(m.add_variable(short_name('Z', zc++), 0.0, 1.0, true, cost));
    }
  }
  lay.arc_variables = zc;

  // Flow rows per aircraft.
  for (int k = 0; k < K; ++k) {
    const Subgraph& g = network.subgraphs[static_cast<std::size_t>(k)];
    const auto& zk = z[static_cast<std::size_t>(k)];
    std::vector<int> node_row(static_cast<std::size_t>(g.vertex_count()), -1);
    for (int i = 0; i < static_cast<int>(g.arcs().size()); ++i) {
      const Arc& a = g.arc(i);
      for (Vertex v : {a.tail, a.head})
        if (node_row[static_cast<std::size_t>(v)] < 0) {
          double rhs = v == g.source() ? 1.0 : (v == g.sink() ? -1.0 : 0.0);
          node_row[static_cast<std::size_t>(v)] = row('E', rhs);
        }
      m.add_entry(node_row[static_cast<std::size_t>(a.tail)], zk[static_cast<std::size_t>(i)], 1.0);
      m.add_entry(node_row[static_cast<std::size_t>(a.head)], zk[static_cast<std::size_t>(i)], -1.0);
    }
  }
  // Every leg once; every maintenance once by its aircraft.
  for (int v = 0; v < n; ++v) {
    int r = row('E', 1.0);
    for (int k = 0; k < K; ++k) {
      const Subgraph& g = network.subgraphs[static_cast<std::size_t>(k)];
      for (int i = 0; i < static_cast<int>(g.arcs().size()); ++i)
        if (g.arc(i).head == v) m.add_entry(r, z[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)], 1.0);
    }
  }

  if (S > 0) {
    // Arcs between activities used by any aircraft: (tail, head, slack, z vars).
    struct Link {
      Vertex u, v;
      double slack;
      std::vector<int> vars;
    };
    std::vector<Link> links;
    std::vector<std::vector<int>> into(static_cast<std::size_t>(n));
    for (const Arc& a : network.graph.arcs()) {
      if (!instance.is_activity(a.tail) || !instance.is_activity(a.head)) continue;
      Link l{a.tail, a.head, a.slack, {}};
      for (int k = 0; k < K; ++k)
        if (auto i = network.subgraphs[static_cast<std::size_t>(k)].find_arc(a.tail, a.head))
          l.vars.push_back(z[static_cast<std::size_t>(k)][static_cast<std::size_t>(*i)]);
      if (l.vars.empty()) continue;
      into[static_cast<std::size_t>(a.head)].push_back(static_cast<int>(links.size()));
      links.push_back(std::move(l));
    }

    // Delay boxes: lower = intrinsic delay, upper by a longest-path sweep.
    std::vector<double> lo(static_cast<std::size_t>(n * S)), hi(static_cast<std::size_t>(n * S));
    auto at = [&](int v, int s) { return static_cast<std::size_t>(s * n + v); };
    for (Vertex v : network.graph.topological_order()) {
      if (!instance.is_activity(v)) continue;
      for (int s = 0; s < S; ++s) {
        double up = 0.0;
        for (int li : into[static_cast<std::size_t>(v)]) {
          const Link& l = links[static_cast<std::size_t>(li)];
          up = std::max(up, hi[at(l.u, s)] - l.slack);
        }
        lo[at(v, s)] = scenarios.xi(s, v);
        hi[at(v, s)] = std::min(scenarios.xi(s, v) + up, 1e4);
      }
    }

    const PwlFunction& f = instance.delay_cost;
    std::vector<Breakpoint> bp(f.breakpoints().begin(), f.breakpoints().end());
    if (bp.empty()) bp.push_back({0.0, f(0.0)});
    const auto slopes = f.slopes();  // left, segments..., right

    int dc = 0, pc = 0, wc = 0, ec = 0;
    std::vector<int> D(static_cast<std::size_t>(n * S));
    for (int s = 0; s < S; ++s)
      for (int v = 0; v < n; ++v) {
        int d = m.add_variable(short_name('D', dc++), lo[at(v, s)], hi[at(v, s)], false, 0.0);
        int p = m.add_variable(short_name('P', pc++), 0.0, kInf, false, 0.0);
        D[at(v, s)] = d;
        int r = row('E', scenarios.xi(s, v));
        m.add_entry(r, d, 1.0);
        m.add_entry(r, p, -1.0);
        lay.delay_variables += 2;
        // P >= sum over in-links of (W - slack * x).
        int prop = row('G', 0.0);
        m.add_entry(prop, p, 1.0);
        for (int li : into[static_cast<std::size_t>(v)]) {
          const Link& l = links[static_cast<std::size_t>(li)];
          double L = lo[at(l.u, s)], U = hi[at(l.u, s)];
          int w = m.add_variable(short_name('W', wc++), std::min(L, 0.0), std::max(U, 0.0), false, 0.0);
          ++lay.delay_variables;
          m.add_entry(prop, w, -1.0);
          for (int zv : l.vars) m.add_entry(prop, zv, l.slack);
          // McCormick envelope of w = x * D_u with D_u in [L, U], x binary.
          int du = D[at(l.u, s)];
          int r1 = row('G', 0.0);  // w - L x >= 0
          m.add_entry(r1, w, 1.0);
          for (int zv : l.vars) m.add_entry(r1, zv, -L);
          int r2 = row('L', 0.0);  // w - U x <= 0
          m.add_entry(r2, w, 1.0);
          for (int zv : l.vars) m.add_entry(r2, zv, -U);
          int r3 = row('G', -U);  // w - D_u - U x >= -U
          m.add_entry(r3, w, 1.0);
          m.add_entry(r3, du, -1.0);
          for (int zv : l.vars) m.add_entry(r3, zv, -U);
          int r4 = row('L', -L);  // w - D_u - L x <= -L
          m.add_entry(r4, w, 1.0);
          m.add_entry(r4, du, -1.0);
          for (int zv : l.vars) m.add_entry(r4, zv, -L);
        }
        if (!instance.charges_delay(v)) continue;
        // D = x_1 + sum of pieces; cost = f(x_1) + sum of slope * piece.
        int split = row('E', bp.front().x);
        m.add_entry(split, d, 1.0);
        for (std::size_t j = 0; j < slopes.size(); ++j) {
          double lower = j == 0 ? -kInf : 0.0;
          double upper = j == 0 ? 0.0 : (j < bp.size() ? bp[j].x - bp[j - 1].x : kInf);
          int e = m.add_variable(short_name('E', ec++), lower, upper, false, slopes[j] / S);
          ++lay.split_variables;
          m.add_entry(split, e, -1.0);
        }
        m.objective_constant += bp.front().y / S;
      }
  }
  m.normalize();
  if (layout) *layout = lay;
  return m;
}

void export_compact_milp(const Instance& instance, const Network& network, const ScenarioSet& scenarios,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_mps(compact_milp(instance, network, scenarios), out);
  if (!out) throw Error("cannot write " + path);
}

Solution decode_compact_solution(const Instance& instance, const Network& network, const std::vector<double>& x) {
  Solution sol;
  int zc = 0;
  for (std::size_t k = 0; k < instance.aircraft.size(); ++k) {
    const Subgraph& g = network.subgraphs[k];
    std::vector<Vertex> next(static_cast<std::size_t>(g.vertex_count()), -1);
    for (const Arc& a : g.arcs()) {
      if (x.at(static_cast<std::size_t>(zc)) > 0.5) next[static_cast<std::size_t>(a.tail)] = a.head;
      ++zc;
    }
    Route r;
    Vertex v = next[static_cast<std::size_t>(g.source())];
    while (v >= 0 && v != g.sink()) {
      r.push_back(v);
      v = next[static_cast<std::size_t>(v)];
    }
    sol.routes.push_back(std::move(r));
  }
  return sol;
}

}  // namespace tail
