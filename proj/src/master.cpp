#include "tail/master.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "tail/errors.hpp"

namespace tail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::uint64_t route_hash(std::span<const int> route) {
  std::uint64_t h = 1469598103934665603ull;
  for (int v : route) {
    auto x = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (x >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

Column make_column(const Instance& instance, const Subgraph& subgraph, const ScenarioSet& scenarios,
                   Route route) {
  Column c;
  c.aircraft = subgraph.aircraft();
  c.operational = route_operational_cost(instance, subgraph, route);
  c.delay = route_delay_cost(instance, route, scenarios);
  c.cost = c.operational + c.delay;
  c.route = std::move(route);
  return c;
}

std::optional<int> ColumnPool::find(int aircraft, std::span<const int> route) const {
  auto key = route_hash(route) ^ (static_cast<std::uint64_t>(aircraft) * 0x9e3779b97f4a7c15ull);
  auto [lo, hi] = index_.equal_range(key);
  for (auto it = lo; it != hi; ++it) {
    const Column& c = columns_[static_cast<std::size_t>(it->second)];
    if (c.aircraft == aircraft && std::equal(c.route.begin(), c.route.end(), route.begin(), route.end()))
      return it->second;
  }
  return std::nullopt;
}

std::pair<int, bool> ColumnPool::add(Column column) {
  if (auto i = find(column.aircraft, column.route)) return {*i, false};
  auto key = route_hash(column.route) ^ (static_cast<std::uint64_t>(column.aircraft) * 0x9e3779b97f4a7c15ull);
  int idx = size();
  columns_.push_back(std::move(column));
  index_.emplace(key, idx);
  return {idx, true};
}

Residual Residual::root(const Instance& instance, const Network& network) {
  Residual r;
  r.aircraft.assign(instance.aircraft.size(), 1);
  r.legs.assign(static_cast<std::size_t>(instance.activity_count()), 0);
  for (int v = 0; v < instance.activity_count(); ++v) r.legs[static_cast<std::size_t>(v)] = instance.is_leg(v);
  r.subgraphs = network.subgraphs;
  return r;
}

Residual Residual::fix(const Instance& instance, const Column& column) const {
  Residual r = *this;
  r.aircraft[static_cast<std::size_t>(column.aircraft)] = 0;
  std::vector<char> removed(static_cast<std::size_t>(instance.vertex_count()), 0);
  for (int v : column.route) {
    removed[static_cast<std::size_t>(v)] = 1;
    r.legs[static_cast<std::size_t>(v)] = 0;
  }
  for (std::size_t k = 0; k < r.subgraphs.size(); ++k)
    if (r.aircraft[k]) r.subgraphs[k] = r.subgraphs[k].without_vertices(removed);
  return r;
}

bool Residual::column_fits(const Column& column) const {
  if (!aircraft[static_cast<std::size_t>(column.aircraft)]) return false;
  return subgraphs[static_cast<std::size_t>(column.aircraft)].is_route(column.route);
}

bool Residual::routable() const {
  for (std::size_t k = 0; k < aircraft.size(); ++k)
    if (aircraft[k] && !subgraphs[k].has_route()) return false;
  return true;
}

int Residual::free_aircraft() const {
  return static_cast<int>(std::count(aircraft.begin(), aircraft.end(), 1));
}

int Residual::open_legs() const { return static_cast<int>(std::count(legs.begin(), legs.end(), 1)); }

RmpSolution solve_rmp_lp(const ColumnPool& pool, std::span<const int> columns, const Residual& residual,
                         double artificial_cost, std::span<const int> warm_basis) {
  const int n = static_cast<int>(residual.legs.size());
  const int K = static_cast<int>(residual.aircraft.size());
  std::vector<int> leg_row(static_cast<std::size_t>(n), -1), ac_row(static_cast<std::size_t>(K), -1);
  LpModel lp;
  for (int v = 0; v < n; ++v)
    if (residual.legs[static_cast<std::size_t>(v)]) leg_row[static_cast<std::size_t>(v)] = lp.add_row(1.0);
  for (int k = 0; k < K; ++k)
    if (residual.aircraft[static_cast<std::size_t>(k)]) ac_row[static_cast<std::size_t>(k)] = lp.add_row(1.0);
  const int m = lp.rows();
  const int art = artificial_cost > 0.0 ? m : 0;
  for (int r = 0; r < art; ++r) {
    const int rows[] = {r};
    const double one[] = {1.0};
    lp.add_column(artificial_cost, rows, one);
  }
  std::vector<int> rows;
  std::vector<double> vals;
  for (int j : columns) {
    const Column& c = pool[j];
    rows.clear();
    for (int v : c.route)
      if (leg_row[static_cast<std::size_t>(v)] >= 0) rows.push_back(leg_row[static_cast<std::size_t>(v)]);
    rows.push_back(ac_row[static_cast<std::size_t>(c.aircraft)]);
    vals.assign(rows.size(), 1.0);
    lp.add_column(c.cost, rows, vals);
  }
  auto sol = solve_lp(lp, {}, warm_basis);
  RmpSolution out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.basis = sol.basis;
  out.leg_duals.assign(static_cast<std::size_t>(n), 0.0);
  out.aircraft_duals.assign(static_cast<std::size_t>(K), 0.0);
  if (sol.status != LpStatus::optimal) return out;
  out.objective = sol.objective;
  for (int r = 0; r < art; ++r) out.artificial += sol.x[static_cast<std::size_t>(r)];
  out.y.assign(sol.x.begin() + art, sol.x.end());
  for (int v = 0; v < n; ++v)
    if (leg_row[static_cast<std::size_t>(v)] >= 0)
      out.leg_duals[static_cast<std::size_t>(v)] = sol.duals[static_cast<std::size_t>(leg_row[static_cast<std::size_t>(v)])];
  for (int k = 0; k < K; ++k)
    if (ac_row[static_cast<std::size_t>(k)] >= 0)
      out.aircraft_duals[static_cast<std::size_t>(k)] = sol.duals[static_cast<std::size_t>(ac_row[static_cast<std::size_t>(k)])];
  return out;
}

ColumnGeneration::ColumnGeneration(const Instance& instance, const Network& network,
                                   const ScenarioSet& scenarios, ColgenOptions options)
    : instance_(&instance), network_(&network), scenarios_(&scenarios), options_(options) {
  bounds_.resize(instance.aircraft.size());
}

double ColumnGeneration::artificial_cost() {
  if (artificial_cost_ > 0.0) return artificial_cost_;
  double ref = 0.0;
  for (const Column& c : pool_.columns()) ref = std::max(ref, c.cost);
  if (pool_.size() == 0) {
    // Every leg at the dearest rate plus a connection per activity.
    for (const auto& ac : instance_->aircraft) {
      double sum = 0.0, conn = std::abs(ac.default_connection_cost);
      for (int v = 0; v < instance_->activity_count(); ++v)
        if (instance_->is_leg(v)) sum += std::abs(ac.activity_cost(v));
      for (const auto& [key, c] : ac.connection_cost) conn = std::max(conn, std::abs(c));
      ref = std::max(ref, sum + conn * (instance_->activity_count() + 1));
    }
  }
  artificial_cost_ = 1e6 * std::max(1.0, ref);
  return artificial_cost_;
}

int ColumnGeneration::add_route(int aircraft, Route route) {
  auto col = make_column(*instance_, network_->subgraphs.at(static_cast<std::size_t>(aircraft)), *scenarios_,
                         std::move(route));
  return pool_.add(std::move(col)).first;
}

const BackwardBounds& ColumnGeneration::bounds(int aircraft) {
  auto& slot = bounds_[static_cast<std::size_t>(aircraft)];
  if (!slot) {
    std::vector<double> zero(static_cast<std::size_t>(instance_->activity_count()), 0.0);
    slot = compute_bounds(*instance_, network_->subgraphs[static_cast<std::size_t>(aircraft)], *scenarios_, zero,
                          options_.meet);
  }
  return *slot;
}

namespace {

template <class F>
void for_each_parallel(const std::vector<int>& items, int threads, F&& f) {
  if (threads <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) f(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), items.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < items.size(); i += workers) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<double> ColumnGeneration::min_reduced_costs(const Residual& residual,
                                                        std::span<const double> leg_duals,
                                                        std::span<const double> aircraft_duals) {
  const int K = static_cast<int>(instance_->aircraft.size());
  std::vector<double> out(static_cast<std::size_t>(K), kInf);
  std::vector<int> free;
  for (int k = 0; k < K; ++k)
    if (residual.aircraft[static_cast<std::size_t>(k)]) free.push_back(k);
  for (int k : free) bounds(k);
  std::vector<BackwardBounds> local(free.size());
  for_each_parallel(free, options_.threads, [&](std::size_t i) {
    int k = free[i];
    const Subgraph& g = residual.subgraphs[static_cast<std::size_t>(k)];
    local[i] = *bounds_[static_cast<std::size_t>(k)];
    refresh_dual_bounds(local[i], *instance_, g, leg_duals);
    PricingOptions po;
    po.use_dominance = options_.use_dominance;
    po.use_bounds = options_.use_bounds;
    auto res = solve_pricing(*instance_, g, *scenarios_, leg_duals, aircraft_duals[static_cast<std::size_t>(k)],
                             &local[i], kInf, po);
    if (!res.routes.empty()) out[static_cast<std::size_t>(k)] = res.routes.front().reduced_cost;
  });
  return out;
}

MasterState ColumnGeneration::run(const Residual& residual, double deadline) {
  const int K = static_cast<int>(instance_->aircraft.size());
  if (deadline <= 0.0 && options_.time_limit > 0.0) deadline = steady_seconds() + options_.time_limit;
  MasterState st;
  for (int j = 0; j < pool_.size(); ++j)
    if (residual.column_fits(pool_[j])) st.columns.push_back(j);

  std::vector<int> free;
  for (int k = 0; k < K; ++k)
    if (residual.aircraft[static_cast<std::size_t>(k)]) free.push_back(k);
  for (int k : free) bounds(k);
  // Per-aircraft copies whose dual part is refreshed on the residual subgraphs.
  std::vector<BackwardBounds> local(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) local[i] = *bounds_[static_cast<std::size_t>(free[i])];

  const double big = artificial_cost();
  const int rows = residual.open_legs() + residual.free_aircraft();
  bool artificials = true;
  std::vector<int> basis;
  while (true) {
    auto rmp = solve_rmp_lp(pool_, st.columns, residual, artificials ? big : 0.0, basis);
    if (rmp.status != LpStatus::optimal) throw Error(std::string("restricted master LP: ") + to_string(rmp.status));
    if (artificials && rmp.artificial <= options_.artificial_tolerance) {
      // Drop the artificials; a basic one at zero becomes the solver's own
      // artificial of its row.
      std::vector<int> mapped;
      for (int j : rmp.basis) mapped.push_back(j >= rows ? j - rows : (j >= 0 ? -1 - j : j));
      artificials = false;
      auto clean = solve_rmp_lp(pool_, st.columns, residual, 0.0, mapped);
      if (clean.status == LpStatus::optimal) rmp = std::move(clean);
      else artificials = true;
    }
    basis = rmp.basis;
    st.y = rmp.y;
    st.leg_duals = rmp.leg_duals;
    st.aircraft_duals = rmp.aircraft_duals;
    st.lp_value = rmp.objective;
    st.artificial = rmp.artificial;
    st.basis = rmp.basis;
    ++st.iterations;

    double t0 = steady_seconds();
    std::vector<std::vector<PricedRoute>> priced(free.size());
    std::vector<double> best(free.size(), 0.0);
    for_each_parallel(free, options_.threads, [&](std::size_t i) {
      int k = free[i];
      const Subgraph& g = residual.subgraphs[static_cast<std::size_t>(k)];
      refresh_dual_bounds(local[i], *instance_, g, st.leg_duals);
      PricingOptions po;
      po.use_dominance = options_.use_dominance;
      po.use_bounds = options_.use_bounds;
      po.max_columns = options_.columns_per_pricing;
      auto res = solve_pricing(*instance_, g, *scenarios_, st.leg_duals, st.aircraft_duals[static_cast<std::size_t>(k)],
                               &local[i], -options_.admit_tolerance, po);
      if (!res.routes.empty()) best[i] = res.routes.front().reduced_cost;
      priced[i] = std::move(res.routes);
    });
    double pricing_seconds = steady_seconds() - t0;

    int added = 0;
    double lagrange = st.lp_value;
    for (std::size_t i = 0; i < free.size(); ++i) {
      lagrange += std::min(best[i], 0.0);
      int k = free[i];
      for (auto& pr : priced[i]) {
        Column col = make_column(*instance_, network_->subgraphs[static_cast<std::size_t>(k)], *scenarios_,
                                 std::move(pr.route));
        double rc = col.cost - st.aircraft_duals[static_cast<std::size_t>(k)];
        for (int v : col.route) rc -= st.leg_duals[static_cast<std::size_t>(v)];
        if (rc >= -options_.admit_tolerance) {
          ++st.rejected;
          continue;
        }
        auto [idx, fresh] = pool_.add(std::move(col));
        bool in_lp = !fresh && std::find(st.columns.begin(), st.columns.end(), idx) != st.columns.end();
        if (in_lp) {
          ++st.rejected;
          continue;
        }
        st.columns.push_back(idx);
        ++added;
      }
    }
    st.lower_bound = lagrange;
    st.columns_added += added;
    if (options_.log)
      *options_.log << st.iterations << ',' << st.lp_value << ',' << added << ',' << pricing_seconds << '\n';
    if (added == 0) {
      st.converged = true;
      st.lower_bound = st.lp_value;
      break;
    }
    if (st.iterations >= options_.max_iterations || (deadline > 0.0 && steady_seconds() > deadline)) {
      st.limit_hit = true;
      break;
    }
  }
  if (st.limit_hit) {
    // y and duals must describe the final column set.
    auto rmp = solve_rmp_lp(pool_, st.columns, residual, artificials ? big : 0.0, basis);
    if (rmp.status == LpStatus::optimal) {
      st.y = rmp.y;
      st.leg_duals = rmp.leg_duals;
      st.aircraft_duals = rmp.aircraft_duals;
      st.lp_value = rmp.objective;
      st.artificial = rmp.artificial;
      st.basis = rmp.basis;
    }
  }
  st.feasible = st.artificial <= options_.artificial_tolerance;
  return st;
}

}  // namespace tail
