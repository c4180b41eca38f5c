#include "tail/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "tail/errors.hpp"

namespace tail {
namespace {

constexpr double kDayStart = 360;  // 06:00

struct Draw {
  std::mt19937_64 rng;
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }
  double minutes(double lo, double hi) { return std::round(uniform(lo, hi)); }
  int index(int n) { return static_cast<int>(unit_uniform(rng) * n); }
};

void check_range(double lo, double hi, const char* what) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
    throw InputError(std::string("invalid range for ") + what);
}

void check_config(const InstanceConfig& c) {
  if (c.aircraft < 1) throw InputError("config needs at least one aircraft");
  if (c.legs < 0) throw InputError("config has a negative leg count");
  if (c.airports < 2) throw InputError("config needs a hub and at least one spoke");
  if (c.horizon_days < 1) throw InputError("config needs a horizon of at least one day");
  if (c.maintenances < 0 || c.mandatory_connections < 0)
    throw InputError("config has a negative count");
  check_range(c.block_time_min, c.block_time_max, "block time");
  check_range(c.min_turn_min, c.min_turn_max, "minimum turn");
  check_range(c.sched_extra_min, c.sched_extra_max, "scheduled turn extra");
  check_range(c.ground_extra_min, c.ground_extra_max, "ground time");
  check_range(c.maintenance_min, c.maintenance_max, "maintenance duration");
  check_range(c.cost_rate_min, c.cost_rate_max, "cost rate");
  check_range(c.connection_cost_min, c.connection_cost_max, "connection cost");
  if (c.idle_cost_rate < 0 || c.idle_cost_cap < 0) throw InputError("idle cost must be non-negative");
  if (c.block_time_min < 1 || c.maintenance_min < 1 || c.min_turn_min < 0 ||
      c.ground_extra_min < 0 || c.cost_rate_min < 0 || c.connection_cost_min < 0)
    throw InputError("config durations and costs must be non-negative");
  if (c.delay_kinks.size() != c.delay_slopes.size() || c.delay_kinks.empty() ||
      c.delay_kinks.front() != 0.0)
    throw InputError("delay cost needs one slope per kink, starting at 0");
  for (std::size_t j = 0; j < c.delay_slopes.size(); ++j) {
    if (c.delay_slopes[j] < 0 || (j > 0 && (c.delay_slopes[j] < c.delay_slopes[j - 1] ||
                                             c.delay_kinks[j] <= c.delay_kinks[j - 1])))
      throw InputError("delay cost must be convex and non-decreasing");
  }
}

struct Built {
  Instance instance;
  Solution witness;
};

struct Pending {
  Activity activity;
  int aircraft;
  int position;
};

std::string airport_name(int a) {
  if (a == 0) return "HUB";
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%02d", a);
  return buf;
}

Built build(const InstanceConfig& c, std::uint64_t seed) {
  check_config(c);
  Draw draw{std::mt19937_64(seed)};
  const int K = c.aircraft;

  std::vector<int> leg_count(static_cast<std::size_t>(K), c.legs / K);
  for (int k = 0; k < c.legs % K; ++k) ++leg_count[static_cast<std::size_t>(k)];

  // Maintenances go at even chain positions, where the aircraft is at the hub.
  std::vector<std::vector<int>> maint_at(static_cast<std::size_t>(K));
  for (int m = 0; m < c.maintenances; ++m) {
    int k = m % K;
    int slots = leg_count[static_cast<std::size_t>(k)] / 2 + 1;
    maint_at[static_cast<std::size_t>(k)].push_back(2 * draw.index(slots));
  }

  std::vector<Pending> pending;
  std::vector<double> rate(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    rate[static_cast<std::size_t>(k)] = draw.uniform(c.cost_rate_min, c.cost_rate_max);
    auto& slots = maint_at[static_cast<std::size_t>(k)];
    std::sort(slots.begin(), slots.end());
    const int n = leg_count[static_cast<std::size_t>(k)];
    const int per_day = std::max(1, (n + c.horizon_days - 1) / c.horizon_days);
    int location = 0;
    double ready = kDayStart + draw.minutes(0, 90);
    int position = 0;
    std::size_t next_slot = 0;
    auto place_maintenances = [&](int leg_index) {
      while (next_slot < slots.size() && slots[next_slot] == leg_index) {
        Activity m;
        m.kind = ActivityKind::maintenance;
        m.origin = m.destination = airport_name(0);
        m.departure = ready + draw.minutes(c.ground_extra_min, c.ground_extra_max);
        m.arrival = m.departure + 15 * std::round(draw.uniform(c.maintenance_min, c.maintenance_max) / 15);
        pending.push_back({m, k, position++});
        ready = m.arrival;
        ++next_slot;
      }
    };
    for (int i = 0; i < n; ++i) {
      place_maintenances(i);
      Activity leg;
      leg.kind = ActivityKind::leg;
      leg.min_turn = draw.minutes(c.min_turn_min, c.min_turn_max);
      leg.sched_turn = std::max(0.0, leg.min_turn + draw.minutes(c.sched_extra_min, c.sched_extra_max));
      double earliest = ready + (position > 0 ? leg.min_turn : 0.0);
      if (i > 0 && i % per_day == 0) {
        double day = std::floor((ready - kDayStart) / 1440.0) + 1;
        earliest = std::max(earliest, day * 1440 + kDayStart + draw.minutes(0, 90));
      }
      leg.departure = earliest + (position > 0 ? draw.minutes(c.ground_extra_min, c.ground_extra_max) : 0.0);
      leg.arrival = leg.departure + 5 * std::round(draw.uniform(c.block_time_min, c.block_time_max) / 5);
      int to = location == 0 ? 1 + draw.index(c.airports - 1) : 0;
      leg.origin = airport_name(location);
      leg.destination = airport_name(to);
      location = to;
      ready = leg.arrival;
      pending.push_back({leg, k, position++});
    }
    place_maintenances(n);
  }

  std::vector<std::size_t> order(pending.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = pending[a];
    const auto& y = pending[b];
    return std::tuple(x.activity.departure, x.activity.arrival, x.aircraft, x.position) <
           std::tuple(y.activity.departure, y.activity.arrival, y.aircraft, y.position);
  });

  Built out;
  Instance& inst = out.instance;
  out.witness.routes.resize(static_cast<std::size_t>(K));
  std::vector<std::vector<std::pair<int, int>>> chain(static_cast<std::size_t>(K));
  int leg_no = 0, maint_no = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Pending p = pending[order[i]];
    char buf[16];
    if (p.activity.is_leg())
      std::snprintf(buf, sizeof buf, "L%03d", ++leg_no);
    else
      std::snprintf(buf, sizeof buf, "M%02d", ++maint_no);
    p.activity.id = buf;
    inst.activities.push_back(p.activity);
    chain[static_cast<std::size_t>(p.aircraft)].emplace_back(p.position, static_cast<int>(i));
  }
  for (int k = 0; k < K; ++k) {
    auto& ch = chain[static_cast<std::size_t>(k)];
    std::sort(ch.begin(), ch.end());
    Aircraft ac;
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d", k + 1);
    ac.id = buf;
    for (const auto& a : inst.activities) {
      double block = a.arrival - a.departure;
      ac.leg_cost.push_back(a.is_leg() ? std::round(block * rate[static_cast<std::size_t>(k)]) : 0.0);
    }
    ac.default_connection_cost = draw.minutes(c.connection_cost_min, c.connection_cost_max);
    if (c.idle_cost_rate > 0) {
      for (std::size_t u = 0; u < inst.activities.size(); ++u)
        for (std::size_t v = 0; v < inst.activities.size(); ++v) {
          const Activity& a = inst.activities[u];
          const Activity& b = inst.activities[v];
          double ground = b.departure - a.arrival;
          if (a.destination != b.origin || ground < b.min_turn) continue;
          ac.connection_cost[Aircraft::arc_key(static_cast<int>(u), static_cast<int>(v))] =
              ac.default_connection_cost + std::round(c.idle_cost_rate * std::min(ground, c.idle_cost_cap));
        }
    }
    for (auto [pos, v] : ch) {
      out.witness.routes[static_cast<std::size_t>(k)].push_back(v);
      if (!inst.activities[static_cast<std::size_t>(v)].is_leg()) ac.maintenances.push_back(v);
    }
    if (!ch.empty()) ac.first_activity = ch.front().second;
    inst.aircraft.push_back(std::move(ac));
  }

  std::vector<std::pair<int, int>> consecutive;
  for (const auto& route : out.witness.routes)
    for (std::size_t i = 1; i < route.size(); ++i) consecutive.emplace_back(route[i - 1], route[i]);
  for (int i = 0; i < c.mandatory_connections && !consecutive.empty(); ++i) {
    int j = draw.index(static_cast<int>(consecutive.size()));
    inst.mandatory_connections.push_back(consecutive[static_cast<std::size_t>(j)]);
    consecutive.erase(consecutive.begin() + j);
  }
  std::sort(inst.mandatory_connections.begin(), inst.mandatory_connections.end());

  inst.delay_cost = PwlFunction::delay_cost(c.delay_kinks, c.delay_slopes);
  return out;
}

}  // namespace

Instance generate_instance(const InstanceConfig& config, std::uint64_t seed) {
  Built b = build(config, seed);
  Network net = preprocess(b.instance);
  validate_solution(b.instance, net, b.witness);
  return std::move(b.instance);
}

Solution generate_witness(const InstanceConfig& config, std::uint64_t seed) {
  return build(config, seed).witness;
}

ScenarioSet generate_scenarios(const Instance& instance, int count, std::uint64_t seed,
                               const DelayDistribution& d) {
  if (count < 1) throw InputError("scenario count must be at least 1");
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(d.dep_zero_prob) || d.dep_zero_prob < 0 || d.dep_zero_prob > 1 ||
      !finite(d.dep_mean) || d.dep_mean < 0 || (d.dep_zero_prob == 1 && d.dep_mean > 0) ||
      !finite(d.arr_mean) || d.arr_mean < 0 || !finite(d.arr_shift) || !finite(d.arr_floor) ||
      d.arr_floor > 0 || !finite(d.resolution) || d.resolution < 0)
    throw InputError("invalid delay distribution parameters");

  std::mt19937_64 rng(seed);
  const double positive_mean = d.dep_zero_prob < 1 ? d.dep_mean / (1 - d.dep_zero_prob) : 0.0;
  const double inv = d.resolution > 0 ? 1.0 / d.resolution : 0.0;
  auto snap = [&](double x) {
    if (d.resolution <= 0) return x;
    if (inv == std::round(inv)) return std::round(x * inv) / inv;
    return std::round(x / d.resolution) * d.resolution;
  };
  const int n = instance.activity_count();
  std::vector<double> dep, arr;
  dep.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(count));
  arr.reserve(dep.capacity());
  for (int s = 0; s < count; ++s) {
    for (int v = 0; v < n; ++v) {
      double u = unit_uniform(rng);
      double e_dep = 0.0;
      if (u >= d.dep_zero_prob) {
        double w = (u - d.dep_zero_prob) / (1 - d.dep_zero_prob);
        e_dep = -positive_mean * std::log1p(-w);
      }
      double e_arr = std::max(-d.arr_mean * std::log1p(-unit_uniform(rng)) - d.arr_shift, d.arr_floor);
      dep.push_back(std::max(snap(e_dep), 0.0));
      arr.push_back(snap(e_arr));
    }
  }
  return ScenarioSet(n, std::move(dep), std::move(arr));
}

}  // namespace tail
