#include <doctest.h>

#include <cmath>
#include <random>

#include "support/delay_oracle.hpp"
#include "support/small_instances.hpp"
#include "tail/errors.hpp"
#include "tail/generator.hpp"
#include "tail/scenario.hpp"

using namespace tail;
using namespace tail::testing;

namespace {

/// Two legs A-B-A whose connection has slack 10.
Instance slack_ten() {
  Instance inst;
  inst.activities.push_back(make_leg("L1", "A", "B", 0, 100, 30, 40));
  inst.activities.push_back(make_leg("L2", "B", "A", 150, 240, 30, 40));
  inst.aircraft.push_back(make_aircraft("K1", 2));
  const double kinks[] = {0.0, 15.0};
  const double slopes[] = {1.0, 3.0};
  inst.delay_cost = PwlFunction::delay_cost(kinks, slopes);
  return inst;
}

ScenarioSet one_scenario(std::vector<double> dep, std::vector<double> arr) {
  int n = static_cast<int>(dep.size());
  return ScenarioSet(n, std::move(dep), std::move(arr));
}

InstanceConfig small_config() {
  InstanceConfig c;
  c.aircraft = 3;
  c.legs = 18;
  c.airports = 4;
  c.horizon_days = 2;
  c.maintenances = 2;
  return c;
}

}  // namespace

TEST_CASE("scenario set") {
  auto sc = one_scenario({1, 2}, {3, -4});
  CHECK(sc.size() == 1);
  CHECK(sc.xi(0, 0) == 4);
  CHECK(sc.xi(0, 1) == -2);
  CHECK_THROWS_AS(one_scenario({-1}, {0}), InputError);
  CHECK_THROWS_AS(ScenarioSet(2, {0, 0, 0}, {0, 0, 0}), InputError);
  CHECK(ScenarioSet::zeros(3, 4).size() == 4);
  CHECK(ScenarioSet::zeros(3, 4).head(2).size() == 2);
}

TEST_CASE("propagation along a route") {
  auto inst = slack_ten();
  REQUIRE(connection_slack(inst, 0, 1) == 10);
  Route route{0, 1};
  SUBCASE("no intrinsic delay") {
    auto d = propagate_route(inst, route, one_scenario({0, 0}, {0, 0}));
    for (int i = 0; i < 2; ++i) {
      CHECK(d.dep(0, i) == 0);
      CHECK(d.arr(0, i) == 0);
    }
  }
  SUBCASE("delay absorbed by slack") {
    auto d = propagate_route(inst, route, one_scenario({8, 0}, {0, 0}));
    CHECK(d.arr(0, 0) == 8);
    CHECK(d.dep(0, 1) == 0);
  }
  SUBCASE("delay propagated beyond slack") {
    auto d = propagate_route(inst, route, one_scenario({20, 5}, {5, 0}));
    CHECK(d.arr(0, 0) == 25);
    CHECK(d.dep(0, 1) == 20);
  }
  SUBCASE("negative slack propagates without upstream delay") {
    inst.activities[1].sched_turn = 60;
    auto d = propagate_route(inst, route, one_scenario({0, 0}, {0, 0}));
    CHECK(d.dep(0, 1) == 10);
  }
  SUBCASE("scenario set of the wrong size") {
    CHECK_THROWS_AS(propagate_route(inst, route, one_scenario({0}, {0})), InputError);
  }
}

TEST_CASE("propagation matches the clock simulator") {
  std::mt19937_64 rng(41);
  auto inst = generate_instance(small_config(), 7);
  auto g = build_graph(inst);
  for (int trial = 0; trial < 200; ++trial) {
    auto route = random_walk(g, rng);
    auto sc = random_scenarios(rng, inst.activity_count(), 5);
    auto d = propagate_route(inst, route, sc);
    for (int s = 0; s < sc.size(); ++s) {
      auto want = simulate_arrival_delays(inst, route, sc, s);
      for (std::size_t i = 0; i < route.size(); ++i)
        REQUIRE(std::abs(d.arr(s, static_cast<int>(i)) - want[i]) <= 1e-9);
    }
    CHECK(route_delay_cost(inst, route, sc) == doctest::Approx(simulate_delay_cost(inst, route, sc)).epsilon(1e-12));
  }
}

TEST_CASE("propagation properties") {
  std::mt19937_64 rng(43);
  auto inst = generate_instance(small_config(), 8);
  auto g = build_graph(inst);
  for (int trial = 0; trial < 100; ++trial) {
    auto route = random_walk(g, rng);
    if (route.size() < 2) continue;
    auto sc = random_scenarios(rng, inst.activity_count(), 1);
    auto base = propagate_route(inst, route, sc);

    // More arrival delay anywhere never reduces downstream arrival delay.
    auto arr = sc.arrivals();
    std::size_t pos = rng() % route.size();
    arr[static_cast<std::size_t>(route[pos])] += 7.5;
    auto bumped = propagate_route(inst, route, ScenarioSet(inst.activity_count(), sc.departures(), arr));
    for (int i = 0; i < base.length; ++i) CHECK(bumped.arr(0, i) >= base.arr(0, i) - 1e-12);

    // Extra slack on one connection lowers the propagated part by at most the extra.
    std::size_t j = 1 + rng() % (route.size() - 1);
    auto shifted = inst;
    double delta = 12.0;
    shifted.activities[static_cast<std::size_t>(route[j])].sched_turn -= delta;
    auto after = propagate_route(shifted, route, sc);
    double before_prop = base.dep(0, static_cast<int>(j)) - sc.departure(0, route[j]);
    double after_prop = after.dep(0, static_cast<int>(j)) - sc.departure(0, route[j]);
    CHECK(after_prop >= 0.0);
    CHECK(after_prop <= before_prop + 1e-12);
    CHECK(after_prop >= before_prop - delta - 1e-12);
  }
}

TEST_CASE("route delay cost") {
  auto inst = slack_ten();
  SUBCASE("zero delays") {
    CHECK(route_delay_cost(inst, Route{0, 1}, ScenarioSet::zeros(2, 3)) == 0);
  }
  SUBCASE("single leg arriving 20 late") {
    CHECK(route_delay_cost(inst, Route{0}, one_scenario({20, 0}, {0, 0})) == doctest::Approx(30));
  }
  SUBCASE("mean over two scenarios") {
    ScenarioSet sc(2, {10, 0, 20, 0}, {0, 0, 0, 0});
    CHECK(route_delay_cost(inst, Route{0}, sc) == doctest::Approx(20));
  }
  SUBCASE("maintenances propagate but cost nothing") {
    Instance m;
    m.activities.push_back(make_maintenance("M", "A", 0, 100));
    m.activities.push_back(make_leg("L", "A", "B", 105, 200, 0, 5));
    m.delay_cost = inst.delay_cost;
    auto sc = one_scenario({30, 0}, {0, 0});
    CHECK(route_delay_cost(m, Route{0, 1}, sc) == doctest::Approx(60));
    CHECK(route_delay_cost(m, Route{0}, sc) == 0);
    m.charge_maintenance_delay = true;
    CHECK(route_delay_cost(m, Route{0}, sc) == doctest::Approx(60));
  }
  SUBCASE("no scenarios") {
    CHECK(route_delay_cost(inst, Route{0, 1}, ScenarioSet()) == 0);
  }
}

TEST_CASE("solution cost") {
  SUBCASE("zero legs") {
    Instance inst;
    inst.aircraft.push_back(make_aircraft("K1", 0));
    inst.aircraft.push_back(make_aircraft("K2", 0));
    auto net = preprocess(inst);
    auto cost = solution_cost(inst, net, Solution{{{}, {}}}, ScenarioSet());
    CHECK(cost.operational == 0);
    CHECK(cost.delay == 0);
    CHECK(cost.total == 0);
  }
  SUBCASE("one aircraft is additive") {
    auto inst = slack_ten();
    auto net = preprocess(inst);
    auto sc = one_scenario({20, 3}, {5, 0});
    auto cost = solution_cost(inst, net, Solution{{{0, 1}}}, sc);
    CHECK(cost.operational == doctest::Approx(route_operational_cost(inst, net.subgraphs[0], Route{0, 1})));
    CHECK(cost.delay == doctest::Approx(route_delay_cost(inst, Route{0, 1}, sc)));
    CHECK(cost.total == doctest::Approx(cost.operational + cost.delay));
  }
  SUBCASE("partition violations name the legs") {
    auto inst = slack_ten();
    auto net = preprocess(inst);
    try {
      solution_cost(inst, net, Solution{{{0}}}, ScenarioSet());
      FAIL("expected a partition error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("L2") != std::string::npos);
    }
    inst.aircraft.push_back(make_aircraft("K2", 2));
    net = preprocess(inst);
    try {
      solution_cost(inst, net, Solution{{{0, 1}, {1}}}, ScenarioSet());
      FAIL("expected a partition error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("more than once: L2") != std::string::npos);
    }
  }
  SUBCASE("generated witness against independent recomputation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto cfg = small_config();
      auto inst = generate_instance(cfg, seed);
      auto witness = generate_witness(cfg, seed);
      auto sc = generate_scenarios(inst, 4, seed);
      auto net = preprocess(inst);
      auto cost = solution_cost(inst, net, witness, sc);
      double op = 0, delay = 0;
      for (std::size_t k = 0; k < witness.routes.size(); ++k) {
        const auto& ac = inst.aircraft[k];
        const auto& r = witness.routes[k];
        op += ac.default_connection_cost * static_cast<double>(r.size() + 1);
        for (int v : r) op += inst.activities[static_cast<std::size_t>(v)].is_leg() ? ac.leg_cost[static_cast<std::size_t>(v)] : 0.0;
        for (std::size_t i = 1; i < r.size(); ++i) {
          double ground = inst.activities[static_cast<std::size_t>(r[i])].departure -
                          inst.activities[static_cast<std::size_t>(r[i - 1])].arrival;
          op += std::round(cfg.idle_cost_rate * std::min(ground, cfg.idle_cost_cap));
        }
        delay += simulate_delay_cost(inst, r, sc);
      }
      CHECK(cost.operational == doctest::Approx(op).epsilon(1e-12));
      CHECK(cost.delay == doctest::Approx(delay).epsilon(1e-12));
    }
  }
}

TEST_CASE("instance generator") {
  SUBCASE("deterministic") {
    auto a = generate_instance(small_config(), 11);
    auto b = generate_instance(small_config(), 11);
    REQUIRE(a.activities.size() == b.activities.size());
    for (std::size_t i = 0; i < a.activities.size(); ++i) {
      CHECK(a.activities[i].id == b.activities[i].id);
      CHECK(a.activities[i].departure == b.activities[i].departure);
      CHECK(a.activities[i].arrival == b.activities[i].arrival);
      CHECK(a.activities[i].origin == b.activities[i].origin);
      CHECK(a.activities[i].sched_turn == b.activities[i].sched_turn);
    }
    for (std::size_t k = 0; k < a.aircraft.size(); ++k) {
      CHECK(a.aircraft[k].leg_cost == b.aircraft[k].leg_cost);
      CHECK(a.aircraft[k].maintenances == b.aircraft[k].maintenances);
      CHECK(a.aircraft[k].first_activity == b.aircraft[k].first_activity);
    }
    auto c = generate_instance(small_config(), 12);
    bool differs = false;
    for (std::size_t i = 0; i < c.activities.size(); ++i)
      differs |= c.activities[i].departure != a.activities[i].departure;
    CHECK(differs);
  }
  SUBCASE("config echo") {
    InstanceConfig cfg;
    cfg.aircraft = 4;
    cfg.legs = 60;
    cfg.mandatory_connections = 3;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto inst = generate_instance(cfg, seed);
      CHECK(inst.legs().size() == 60);
      CHECK(inst.aircraft.size() == 4);
      CHECK(inst.activity_count() == 60 + cfg.maintenances);
      CHECK(inst.mandatory_connections.size() == 3);
      auto witness = generate_witness(cfg, seed);
      auto net = preprocess(inst);
      CHECK_NOTHROW(validate_solution(inst, net, witness));
      for (const auto& r : witness.routes)
        for (std::size_t i = 1; i < r.size(); ++i) {
          const auto& u = inst.activities[static_cast<std::size_t>(r[i - 1])];
          const auto& v = inst.activities[static_cast<std::size_t>(r[i])];
          CHECK(u.destination == v.origin);
          CHECK(u.arrival + v.min_turn <= v.departure);
        }
    }
  }
  SUBCASE("ground time cost on connections") {
    InstanceConfig cfg = small_config();
    cfg.idle_cost_rate = 2;
    cfg.idle_cost_cap = 90;
    auto inst = generate_instance(cfg, 4);
    auto g = build_graph(inst);
    for (const auto& ac : inst.aircraft) {
      for (const Arc& a : g.arcs()) {
        double want = ac.default_connection_cost;
        if (inst.is_activity(a.tail) && inst.is_activity(a.head)) {
          double ground = inst.activities[static_cast<std::size_t>(a.head)].departure -
                          inst.activities[static_cast<std::size_t>(a.tail)].arrival;
          want += std::round(2 * std::min(ground, 90.0));
        }
        CHECK(ac.connection(a.tail, a.head) == want);
      }
    }
    cfg.idle_cost_rate = 0;
    for (const auto& ac : generate_instance(cfg, 4).aircraft) CHECK(ac.connection_cost.empty());
  }
  SUBCASE("bad configs rejected") {
    InstanceConfig cfg;
    cfg.airports = 1;
    CHECK_THROWS_AS(generate_instance(cfg, 1), InputError);
    cfg = InstanceConfig{};
    cfg.delay_slopes = {30, 10, 60};
    CHECK_THROWS_AS(generate_instance(cfg, 1), InputError);
  }
}

TEST_CASE("scenario generator") {
  auto inst = generate_instance(small_config(), 3);
  SUBCASE("reproducible") {
    auto a = generate_scenarios(inst, 1, 5);
    auto b = generate_scenarios(inst, 1, 5);
    CHECK(a.departures() == b.departures());
    CHECK(a.arrivals() == b.arrivals());
    for (double x : a.departures()) CHECK(x >= 0);
    for (double x : a.arrivals()) CHECK(x >= -10);
  }
  SUBCASE("all mass at zero") {
    DelayDistribution d{1.0, 0.0, 0.0, 0.0, -10.0, 0.1};
    auto sc = generate_scenarios(inst, 3, 5, d);
    for (double x : sc.departures()) CHECK(x == 0);
    for (double x : sc.arrivals()) CHECK(x == 0);
  }
  SUBCASE("departure mean") {
    Instance one;
    one.activities.push_back(make_leg("L", "A", "B", 0, 60));
    DelayDistribution d;
    d.resolution = 0;
    auto sc = generate_scenarios(one, 100000, 17, d);
    double sum = 0;
    int zeros = 0;
    for (double x : sc.departures()) {
      sum += x;
      zeros += x == 0;
    }
    CHECK(std::abs(sum / 100000 - d.dep_mean) <= 0.05 * d.dep_mean);
    CHECK(std::abs(zeros / 100000.0 - d.dep_zero_prob) <= 0.01);
  }
  SUBCASE("invalid parameters") {
    DelayDistribution d;
    d.dep_zero_prob = 1.5;
    CHECK_THROWS_AS(generate_scenarios(inst, 1, 1, d), InputError);
    CHECK_THROWS_AS(generate_scenarios(inst, 0, 1), InputError);
  }
}
