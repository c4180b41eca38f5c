#include "tail/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "tail/errors.hpp"

namespace tail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-6;

IntegerSolution make_integer_solution(const ColumnGeneration& cg, std::vector<int> columns) {
  IntegerSolution out;
  const auto& inst = cg.instance();
  out.solution.routes.assign(inst.aircraft.size(), Route{});
  for (int j : columns)
    if (j >= 0) out.solution.routes[static_cast<std::size_t>(cg.pool()[j].aircraft)] = cg.pool()[j].route;
  out.columns.assign(inst.aircraft.size(), -1);
  for (int j : columns)
    if (j >= 0) out.columns[static_cast<std::size_t>(cg.pool()[j].aircraft)] = j;
  out.cost = solution_cost(inst, cg.network(), out.solution, cg.scenarios());
  return out;
}

// An option of the restricted integer master: a pool column, or aircraft k
// idle on its empty route (pool index -1).
struct Option {
  int pool = -1;
  int aircraft = 0;
  double cost = 0.0;
  const Route* route = nullptr;
};

struct RmhNode {
  std::vector<int> fixed;     // option indices at 1
  std::vector<char> removed;  // option indices at 0
};

}  // namespace

RmhResult restricted_master_heuristic(const ColumnGeneration& cg, const RmhOptions& options) {
  const auto& inst = cg.instance();
  const auto& pool = cg.pool();
  const int n = inst.activity_count();
  const int K = static_cast<int>(inst.aircraft.size());
  const double deadline = options.time_limit > 0 ? steady_seconds() + options.time_limit : 0.0;
  static const Route kEmpty;

  std::vector<Option> opts;
  for (int j = 0; j < pool.size(); ++j) opts.push_back({j, pool[j].aircraft, pool[j].cost, &pool[j].route});
  for (int k = 0; k < K; ++k) {
    const Subgraph& g = cg.network().subgraphs[static_cast<std::size_t>(k)];
    if (g.is_route(kEmpty) && !pool.find(k, kEmpty))
      opts.push_back({-1, k, route_cost(inst, g, kEmpty, cg.scenarios()), &kEmpty});
  }
  const int m = static_cast<int>(opts.size());

  RmhResult result;
  double incumbent = kInf;
  std::vector<int> best_fixed;
  std::vector<RmhNode> stack;
  stack.push_back({{}, std::vector<char>(static_cast<std::size_t>(m), 0)});
  bool root = true;

  while (!stack.empty()) {
    if (result.nodes >= options.node_limit || (deadline > 0 && steady_seconds() > deadline)) {
      result.limit_hit = true;
      break;
    }
    RmhNode node = std::move(stack.back());
    stack.pop_back();
    ++result.nodes;

    // Rows and columns left after the fixings.
    std::vector<char> leg_used(static_cast<std::size_t>(n), 0), ac_used(static_cast<std::size_t>(K), 0);
    double fixed_cost = 0.0;
    for (int o : node.fixed) {
      ac_used[static_cast<std::size_t>(opts[static_cast<std::size_t>(o)].aircraft)] = 1;
      for (int v : *opts[static_cast<std::size_t>(o)].route) leg_used[static_cast<std::size_t>(v)] = 1;
      fixed_cost += opts[static_cast<std::size_t>(o)].cost;
    }
    std::vector<int> leg_row(static_cast<std::size_t>(n), -1), ac_row(static_cast<std::size_t>(K), -1);
    LpModel lp;
    for (int v = 0; v < n; ++v)
      if (inst.is_leg(v) && !leg_used[static_cast<std::size_t>(v)]) leg_row[static_cast<std::size_t>(v)] = lp.add_row(1.0);
    for (int k = 0; k < K; ++k)
      if (!ac_used[static_cast<std::size_t>(k)]) ac_row[static_cast<std::size_t>(k)] = lp.add_row(1.0);
    std::vector<int> lp_opts;
    std::vector<int> rows;
    std::vector<double> vals;
    for (int o = 0; o < m; ++o) {
      const Option& op = opts[static_cast<std::size_t>(o)];
      if (node.removed[static_cast<std::size_t>(o)] || ac_used[static_cast<std::size_t>(op.aircraft)]) continue;
      bool clash = false;
      for (int v : *op.route) clash = clash || leg_used[static_cast<std::size_t>(v)];
      if (clash) continue;
      rows.clear();
      for (int v : *op.route)
        if (leg_row[static_cast<std::size_t>(v)] >= 0) rows.push_back(leg_row[static_cast<std::size_t>(v)]);
      rows.push_back(ac_row[static_cast<std::size_t>(op.aircraft)]);
      vals.assign(rows.size(), 1.0);
      lp.add_column(op.cost, rows, vals);
      lp_opts.push_back(o);
    }
    double bound = fixed_cost;
    std::vector<double> x;
    if (lp.rows() > 0) {
      auto sol = solve_lp(lp);
      if (sol.status != LpStatus::optimal) {
        root = false;
        continue;
      }
      bound += sol.objective;
      x = std::move(sol.x);
    }
    if (root) result.root_bound = bound;
    root = false;
    if (bound >= incumbent - 1e-9) continue;

    int branch = -1;
    double score = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double frac = std::min(x[i], 1.0 - x[i]);
      if (frac > kIntTol && frac > score + 1e-12) {
        score = frac;
        branch = lp_opts[i];
      }
    }
    if (branch < 0) {
      std::vector<int> chosen = node.fixed;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.5) chosen.push_back(lp_opts[i]);
      incumbent = bound;
      best_fixed = std::move(chosen);
      continue;
    }
    RmhNode zero = node;
    zero.removed[static_cast<std::size_t>(branch)] = 1;
    RmhNode one = std::move(node);
    one.fixed.push_back(branch);
    stack.push_back(std::move(zero));
    stack.push_back(std::move(one));
  }

  if (incumbent < kInf) {
    std::vector<int> cols;
    for (int o : best_fixed) cols.push_back(opts[static_cast<std::size_t>(o)].pool);
    result.best = make_integer_solution(cg, cols);
  }
  return result;
}

namespace {

struct DiveNode {
  Residual residual;
  MasterState state;
  std::vector<int> fixed;
  std::vector<char> tried;
  int via = -1;
  int id = 0;
};

}  // namespace

DivingResult diving(ColumnGeneration& cg, const DivingOptions& options) {
  const auto& inst = cg.instance();
  const double deadline = options.time_limit > 0 ? steady_seconds() + options.time_limit : 0.0;
  DivingResult result;
  std::vector<char> taboo;
  auto is_taboo = [&](int j) { return j < static_cast<int>(taboo.size()) && taboo[static_cast<std::size_t>(j)]; };
  auto add_taboo = [&](int j) {
    if (j >= static_cast<int>(taboo.size())) taboo.resize(static_cast<std::size_t>(j) + 1, 0);
    if (!taboo[static_cast<std::size_t>(j)]) {
      taboo[static_cast<std::size_t>(j)] = 1;
      result.taboo.push_back(j);
    }
  };
  auto trace = [&](int node, int depth, const char* event, int column, double value, double lp) {
    if (!options.trace) return;
    *options.trace << node << ',' << depth << ',' << event << ',';
    if (column >= 0)
      *options.trace << inst.aircraft[static_cast<std::size_t>(cg.pool()[column].aircraft)].id << ',' << column;
    else
      *options.trace << ',';
    *options.trace << ',' << value << ',' << lp << ',' << result.backtracks << '\n';
  };

  std::vector<DiveNode> stack;
  {
    DiveNode root;
    root.residual = Residual::root(inst, cg.network());
    root.state = cg.run(root.residual, deadline);
    result.root_bound = root.state.lp_value;
    result.root_converged = root.state.converged;
    result.nodes = 1;
    trace(0, 0, "root", -1, 0.0, root.state.lp_value);
    if (!root.state.feasible) {
      result.time_limit_hit = root.state.limit_hit;
      return result;
    }
    stack.push_back(std::move(root));
  }

  auto finish = [&](std::vector<int> fixed) {
    result.best = make_integer_solution(cg, std::move(fixed));
    double denom = std::abs(result.root_bound);
    result.gap = denom > 1e-12 ? (result.best->cost.total - result.root_bound) / denom : 0.0;
  };

  while (!stack.empty()) {
    if (deadline > 0 && steady_seconds() > deadline) {
      result.time_limit_hit = true;
      break;
    }
    DiveNode& node = stack.back();
    const int depth = static_cast<int>(stack.size()) - 1;
    if (node.residual.free_aircraft() == 0) {
      finish(node.fixed);
      break;
    }

    // Candidate with the largest value; ties by aircraft id then route hash.
    int pick = -1;
    double pick_value = 0.0;
    for (std::size_t i = 0; i < node.state.columns.size(); ++i) {
      int j = node.state.columns[i];
      double y = node.state.y[i];
      if (y <= kIntTol || is_taboo(j)) continue;
      if (j < static_cast<int>(node.tried.size()) && node.tried[static_cast<std::size_t>(j)]) continue;
      bool better = pick < 0 || y > pick_value + 1e-9;
      if (!better && y > pick_value - 1e-9) {
        const Column& a = cg.pool()[j];
        const Column& b = cg.pool()[pick];
        const auto& ida = inst.aircraft[static_cast<std::size_t>(a.aircraft)].id;
        const auto& idb = inst.aircraft[static_cast<std::size_t>(b.aircraft)].id;
        better = ida < idb || (ida == idb && route_hash(a.route) < route_hash(b.route));
      }
      if (better) {
        pick = j;
        pick_value = y;
      }
    }
    if (pick < 0) {
      int via = node.via;
      trace(node.id, depth, "exhausted", via, 0.0, node.state.lp_value);
      stack.pop_back();
      if (stack.empty()) break;
      add_taboo(via);
      ++result.backtracks;
      if (static_cast<int>(result.taboo.size()) > options.taboo) {
        result.taboo_exceeded = true;
        break;
      }
      continue;
    }
    if (pick >= static_cast<int>(node.tried.size())) node.tried.resize(static_cast<std::size_t>(pick) + 1, 0);
    node.tried[static_cast<std::size_t>(pick)] = 1;

    DiveNode child;
    child.residual = node.residual.fix(inst, cg.pool()[pick]);
    child.fixed = node.fixed;
    child.fixed.push_back(pick);
    child.via = pick;
    child.id = result.nodes++;
    bool feasible;
    if (child.residual.free_aircraft() == 0) {
      feasible = child.residual.open_legs() == 0;
    } else if (!child.residual.routable()) {
      feasible = false;
    } else {
      child.state = cg.run(child.residual, deadline);
      feasible = child.state.feasible;
    }
    trace(child.id, depth + 1, feasible ? "fix" : "infeasible", pick, pick_value, child.state.lp_value);
    if (!feasible) {
      add_taboo(pick);
      ++result.backtracks;
      if (static_cast<int>(result.taboo.size()) > options.taboo) {
        result.taboo_exceeded = true;
        break;
      }
      continue;
    }
    stack.push_back(std::move(child));
  }
  return result;
}

}  // namespace tail
