// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "support/delay_oracle.hpp"
#include "support/pricing_oracle.hpp"
#include "support/pwl_properties.hpp"
#include "support/small_instances.hpp"
#include "support/tiny_instances.hpp"
#include "tail/cli.hpp"
#include "tail/errors.hpp"
#include "tail/exact.hpp"
#include "tail/heuristics.hpp"
#include "tail/milp.hpp"

using namespace tail;
using namespace tail::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome pwl_suite() {
  Outcome o;
  const double start = steady_seconds();
  std::mt19937_64 rng(20240611);
  const int cases = 10000;
  using Check = std::function<std::string(std::mt19937_64&)>;
  const std::pair<const char*, Check> ops[] = {
      {"add", [](auto& r) { return case_add(r); }},
      {"compose_affine", [](auto& r) { return case_compose_affine(r); }},
      {"compose_prop", [](auto& r) { return case_compose_prop(r); }},
      {"pointwise_min", [](auto& r) { return case_pointwise_min(r); }},
      {"convex_meet", [](auto& r) { return case_convex_meet(r); }},
      {"meet_associative", [](auto& r) { return case_meet_associative(r); }},
  };
  for (const auto& [name, check] : ops) {
    for (int i = 0; i < cases && o.pass; ++i) {
      std::string err = check(rng);
      if (!err.empty()) o.fail(std::string(name) + " case " + std::to_string(i) + ": " + err);
    }
  }
  const double secs = steady_seconds() - start;
  if (secs >= 30.0) o.fail("runtime " + fmt("%.1f s", secs));
  if (o.pass) o.detail = "6 operations x 10000 cases in " + fmt("%.1f s", secs);
  return o;
}

Outcome propagation_suite() {
  Outcome o;
  // Slack 10 between the two legs.
  Instance two;
  two.activities.push_back(make_leg("L1", "A", "B", 0, 100, 30, 40));
  two.activities.push_back(make_leg("L2", "B", "A", 150, 240, 30, 40));
  two.aircraft.push_back(make_aircraft("K1", 2));
  const Route pair{0, 1};
  auto absorbed = propagate_route(two, pair, ScenarioSet(2, {8, 0}, {0, 0}));
  if (absorbed.dep(0, 1) != 0.0) o.fail("delay 8 under slack 10 was not absorbed");
  auto passed = propagate_route(two, pair, ScenarioSet(2, {20, 5}, {5, 0}));
  if (passed.dep(0, 1) != 20.0) o.fail("delay 25 over slack 10 with eps 5 did not give 20");

  InstanceConfig c;
  c.aircraft = 4;
  c.legs = 40;
  c.airports = 5;
  c.horizon_days = 2;
  c.maintenances = 2;
  std::mt19937_64 rng(77);
  double worst = 0.0;
  int routes = 0;
  for (std::uint64_t seed = 0; routes < 1000; ++seed) {
    Instance inst = generate_instance(c, seed);
    ConnectionGraph g = build_graph(inst);
    for (int r = 0; r < 100; ++r, ++routes) {
      Route route = random_walk(g, rng);
      ScenarioSet sc = random_scenarios(rng, inst.activity_count(), 10);
      RouteDelays d = propagate_route(inst, route, sc);
      for (int s = 0; s < sc.size(); ++s) {
        auto want = simulate_arrival_delays(inst, route, sc, s);
        for (std::size_t i = 0; i < route.size(); ++i)
          worst = std::max(worst, std::abs(d.arr(s, static_cast<int>(i)) - want[i]));
      }
    }
  }
  if (worst > 1e-9) o.fail("max deviation from the clock simulator " + fmt("%.3g", worst));
  if (o.pass) o.detail = "1000 routes x 10 scenarios, max deviation " + fmt("%.3g", worst);
  return o;
}

std::vector<PricingCase> pricing_cases() {
  std::mt19937_64 rng(5150);
  std::vector<PricingCase> cases;
  for (int i = 0; i < 200; ++i) cases.push_back(random_pricing_case(rng));
  return cases;
}

Outcome pricing_suite(const std::vector<PricingCase>& cases) {
  Outcome o;
  const double start = steady_seconds();
  int largest = 0, most_scenarios = 0;
  for (std::size_t i = 0; i < cases.size() && o.pass; ++i) {
    largest = std::max(largest, cases[i].instance.activity_count());
    most_scenarios = std::max(most_scenarios, cases[i].scenarios.size());
    for (MeetMode mode : {MeetMode::convex, MeetMode::exact}) {
      std::string err = check_pricing_case(cases[i], mode);
      if (!err.empty()) o.fail("case " + std::to_string(i) + ": " + err);
    }
  }
  if (largest > 12 || most_scenarios > 3) o.fail("a case exceeds 12 activities or 3 scenarios");
  const double secs = steady_seconds() - start;
  if (secs >= 120.0) o.fail("runtime " + fmt("%.1f s", secs));
  if (o.pass)
    o.detail = "200 subgraphs, dominance and bounds toggled, both meets, " + fmt("%.1f s", secs);
  return o;
}

Outcome bounds_suite(const std::vector<PricingCase>& cases) {
  Outcome o;
  for (std::size_t i = 0; i < cases.size() && o.pass; ++i)
    for (MeetMode mode : {MeetMode::convex, MeetMode::exact}) {
      std::string err = check_bounds_case(cases[i], mode);
      if (!err.empty()) o.fail("case " + std::to_string(i) + (mode == MeetMode::convex ? " convex: " : " exact: ") + err);
    }
  if (o.pass) o.detail = "200 subgraphs, every vertex and suffix, 50 grid points, both meets";
  return o;
}

struct TinyRun {
  double c_low = 0, full_lp = 0, exact = 0, diving = 0, rmh = 0;
  bool converged = false, dive_found = false, rmh_found = false;
};

std::vector<TinyRun> tiny_runs() {
  std::vector<TinyRun> runs;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TinyCase t = tiny_case(seed);
    TinyRun r;
    ColumnGeneration root(t.instance, t.network, t.scenarios);
    MasterState st = root.run(Residual::root(t.instance, t.network));
    r.converged = st.converged && st.feasible;
    r.c_low = st.lp_value;
    r.full_lp = full_enumeration_lp(t);
    r.exact = exact_solve(t.instance, t.network, t.scenarios).cost.total;
    RmhResult rmh = restricted_master_heuristic(root);
    r.rmh_found = rmh.best.has_value();
    if (rmh.best) r.rmh = rmh.best->cost.total;
    ColumnGeneration cg(t.instance, t.network, t.scenarios);
    DivingResult d = diving(cg);
    r.dive_found = d.best.has_value();
    if (d.best) r.diving = d.best->cost.total;
    runs.push_back(r);
  }
  return runs;
}

Outcome colgen_suite(const std::vector<TinyRun>& runs) {
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const TinyRun& r = runs[i];
    if (!r.converged) o.fail("seed " + std::to_string(i) + " did not converge");
    double diff = std::abs(r.c_low - r.full_lp);
    worst = std::max(worst, diff);
    if (diff > 1e-6 * std::max(1.0, std::abs(r.full_lp)))
      o.fail("seed " + std::to_string(i) + ": c_low " + fmt("%.9g", r.c_low) + " vs LP " + fmt("%.9g", r.full_lp));
    if (r.c_low > r.exact + 1e-6) o.fail("seed " + std::to_string(i) + ": c_low above the exact optimum");
  }
  if (o.pass) o.detail = "50 tiny instances, max |c_low - full LP| " + fmt("%.3g", worst);
  return o;
}

Outcome sandwich_suite(const std::vector<TinyRun>& runs) {
  Outcome o;
  int matches = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const TinyRun& r = runs[i];
    const std::string s = "seed " + std::to_string(i) + ": ";
    if (!r.dive_found || !r.rmh_found) {
      o.fail(s + "a heuristic found no solution");
      continue;
    }
    if (r.c_low > r.exact + 1e-6) o.fail(s + "c_low > exact");
    if (r.exact > r.diving + 1e-6) o.fail(s + "exact > diving");
    if (r.diving > r.rmh + 1e-6)
      o.fail(s + "diving " + fmt("%.9g", r.diving) + " > RMH " + fmt("%.9g", r.rmh));
    if (std::abs(r.diving - r.exact) <= 1e-6) ++matches;
  }
  if (matches * 10 < static_cast<int>(runs.size()) * 9)
    o.fail("diving matches exact on " + std::to_string(matches) + "/50");
  if (o.pass) o.detail = "ordering holds on 50/50, diving = exact on " + std::to_string(matches) + "/50";
  else o.detail += " (diving = exact on " + std::to_string(matches) + "/50)";
  return o;
}

Outcome tradeoff_suite() {
  Outcome o;
  const double start = steady_seconds();
  InstanceConfig c;
  c.aircraft = 6;
  c.legs = 100;
  int wins = 0, solved = 0;
  double det_delay = 0, dive_delay = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Instance inst = generate_instance(c, seed);
    Network net = preprocess(inst);
    ScenarioSet training = generate_scenarios(inst, 10, stream_seed(seed, kTrainingStream));
    ScenarioSet evaluation = generate_scenarios(inst, 100, stream_seed(seed, kEvaluationStream));
    SolveOptions det_opt;
    det_opt.method = Method::det;
    SolveOutcome det = run_solve(inst, net, ScenarioSet(), evaluation, det_opt);
    SolveOptions dive_opt;
    dive_opt.method = Method::diving;
    SolveOutcome dive = run_solve(inst, net, training, evaluation, dive_opt);
    if (!det.solution || !dive.solution) continue;
    ++solved;
    CostBreakdown a = solution_cost(inst, net, *det.solution, evaluation);
    CostBreakdown b = solution_cost(inst, net, *dive.solution, evaluation);
    if (b.total < a.total) ++wins;
    det_delay += a.delay;
    dive_delay += b.delay;
    std::printf("  medium seed %2d: baseline %.0f (delay %.0f), diving %.0f (delay %.0f)\n",
                static_cast<int>(seed), a.total, a.delay, b.total, b.delay);
    std::fflush(stdout);
  }
  const double secs = steady_seconds() - start;
  const double reduction = det_delay > 0 ? 1.0 - dive_delay / det_delay : 0.0;
  o.detail = "diving cheaper on " + std::to_string(wins) + "/50, delay-cost reduction " +
             fmt("%.1f%%", 100.0 * reduction) + ", " + fmt("%.0f s", secs);
  if (solved < 50) o.fail("only " + std::to_string(solved) + "/50 instances solved by both methods; " + o.detail);
  if (wins * 10 < 50 * 8) o.fail(o.detail);
  if (reduction < 0.30) o.fail(o.detail);
  if (secs >= 1800.0) o.fail(o.detail);
  return o;
}

Outcome mps_suite() {
  Outcome o;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TinyCase t = tiny_case(seed);
    MilpModel m = compact_milp(t.instance, t.network, t.scenarios);
    std::stringstream first;
    write_mps(m, first);
    MilpModel back = read_mps(first);
    bool same = back.variables.size() == m.variables.size() && back.rows.size() == m.rows.size() &&
                back.objective_constant == m.objective_constant;
    for (std::size_t j = 0; same && j < m.variables.size(); ++j) {
      const auto &a = m.variables[j], &b = back.variables[j];
      same = a.name == b.name && a.lower == b.lower && a.upper == b.upper && a.integer == b.integer && a.cost == b.cost;
    }
    for (std::size_t i = 0; same && i < m.rows.size(); ++i) {
      const auto &a = m.rows[i], &b = back.rows[i];
      same = a.name == b.name && a.sense == b.sense && a.rhs == b.rhs && a.vars == b.vars && a.coefs == b.coefs;
    }
    std::stringstream second;
    write_mps(back, second);
    if (!same || first.str() != second.str()) o.fail("seed " + std::to_string(seed) + ": round trip changed the model");

    CompactLayout layout;
    MilpModel det = compact_milp(t.instance, t.network, ScenarioSet(), &layout);
    if (layout.delay_variables != 0 || layout.split_variables != 0)
      o.fail("seed " + std::to_string(seed) + ": zero-scenario export has delay variables");
    std::stringstream text;
    write_mps(det, text);
    MilpResult res = solve_milp(read_mps(text));
    double exact = exact_solve(t.instance, t.network, ScenarioSet()).cost.total;
    if (res.status != MilpStatus::optimal || std::abs(res.objective - exact) > 1e-6 * std::max(1.0, exact))
      o.fail("seed " + std::to_string(seed) + ": zero-scenario optimum " + fmt("%.9g", res.objective) + " vs exact " +
             fmt("%.9g", exact));
    ++checked;
  }
  if (o.pass)
    o.detail = std::to_string(checked) + " instances: identical matrix after write-read-write, zero-scenario optimum = exact";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism_suite() {
  Outcome o;
  fs::path root = fs::temp_directory_path() / ("tail_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  InstanceConfig c;
  c.aircraft = 4;
  c.legs = 40;
  c.horizon_days = 2;
  Instance inst = generate_instance(c, 9);
  write_text_file(root / "instance.json", format_json(instance_to_json(inst)));
  int compared = 0;
  for (Method m : {Method::det, Method::rmh, Method::diving, Method::export_mps}) {
    std::string files[2][3];
    for (int run = 0; run < 2; ++run) {
      SolveArgs args;
      args.instance = root / "instance.json";
      args.sample = 5;
      args.options.seed = 17;
      args.options.method = m;
      args.out_dir = root / (std::string(method_name(m)) + std::to_string(run));
      std::ostringstream err;
      int code = cmd_solve(args, err);
      if (code != kExitOk) o.fail(std::string(method_name(m)) + " exited with " + std::to_string(code));
      files[run][0] = slurp(args.out_dir / "solution.json");
      files[run][1] = format_json(without_timing(read_json_file(args.out_dir / "report.json")));
      files[run][2] = slurp(args.out_dir / "model.mps");
    }
    for (int f = 0; f < 3; ++f)
      if (files[0][f] != files[1][f]) o.fail(std::string(method_name(m)) + ": outputs differ between runs");
    ++compared;
  }
  fs::remove_all(root);
  if (o.pass) o.detail = std::to_string(compared) + " methods, solution and report identical across two runs";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("criterion %d [PRIMARY] %s: %s (%s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  report(1, "PWL algebra suite", pwl_suite());
  report(2, "propagation suite", propagation_suite());
  auto cases = pricing_cases();
  report(3, "pricing oracle equivalence", pricing_suite(cases));
  report(4, "bound validity", bounds_suite(cases));
  auto runs = tiny_runs();
  report(5, "column generation exactness", colgen_suite(runs));
  report(6, "sandwich ordering", sandwich_suite(runs));
  report(7, "trade-off direction", tradeoff_suite());
  report(8, "MPS export", mps_suite());
  report(9, "determinism", determinism_suite());
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
