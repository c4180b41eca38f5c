#include <doctest.h>

#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "tail/cli.hpp"
#include "tail/errors.hpp"
#include "tail/exact.hpp"
#include "tail/milp.hpp"

using namespace tail;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TAIL_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tail_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

// Optimum over the cross product of enumerated routes.
double brute_force(const Instance& inst, const Network& net, const ScenarioSet& sc) {
  std::vector<std::vector<Route>> routes;
  for (const auto& g : net.subgraphs) routes.push_back(enumerate_routes(g));
  Solution sol;
  sol.routes.resize(inst.aircraft.size());
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == routes.size()) {
      try {
        best = std::min(best, solution_cost(inst, net, sol, sc).total);
      } catch (const InputError&) {
      }
      return;
    }
    for (const auto& r : routes[k]) {
      sol.routes[k] = r;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

struct Fixture {
  Instance instance = instance_from_json(read_json_file(kData / "fixture_instance.json"));
  Network network = preprocess(instance);
  ScenarioSet scenarios = scenarios_from_json(instance, read_json_file(kData / "fixture_scenarios.json"));
};

}  // namespace

TEST_CASE("exact method on the fixture reproduces the golden solution") {
  Fixture f;
  CHECK(f.instance.activity_count() == 8);
  fs::path out = scratch("exact");
  SolveArgs args;
  args.instance = kData / "fixture_instance.json";
  args.scenarios = kData / "fixture_scenarios.json";
  args.out_dir = out;
  args.options.method = Method::exact;
  std::ostringstream err;
  REQUIRE(cmd_solve(args, err) == kExitOk);
  CHECK(slurp(out / "solution.json") == slurp(kData / "fixture_solution.json"));

  Solution golden = solution_from_json(f.instance, read_json_file(kData / "fixture_solution.json"));
  double cost = solution_cost(f.instance, f.network, golden, f.scenarios).total;
  CHECK(cost == doctest::Approx(brute_force(f.instance, f.network, f.scenarios)).epsilon(1e-12));
  Json report = read_json_file(out / "report.json");
  CHECK(report["cost"]["total"].get<double>() == doctest::Approx(cost));
  CHECK(report["gap"].get<double>() == 0.0);
}

TEST_CASE("every method produces a valid solution on the fixture") {
  Fixture f;
  for (Method m : {Method::det, Method::rmh, Method::diving, Method::exact}) {
    SolveOptions o;
    o.method = m;
    auto res = run_solve(f.instance, f.network, f.scenarios, f.scenarios, o);
    INFO(method_name(m));
    REQUIRE(res.exit_code == kExitOk);
    REQUIRE(res.solution);
    CHECK_NOTHROW(validate_solution(f.instance, f.network, *res.solution));
    if (m != Method::det) CHECK(res.report["gap"].get<double>() >= -1e-9);
  }
  SolveOptions o;
  o.method = Method::colgen;
  auto lp = run_solve(f.instance, f.network, f.scenarios, f.scenarios, o);
  CHECK(lp.exit_code == kExitOk);
  CHECK_FALSE(lp.solution);
  CHECK(lp.report["lower_bound"].get<double>() <= brute_force(f.instance, f.network, f.scenarios) + 1e-6);
}

TEST_CASE("export-mps on the fixture matches the golden model") {
  fs::path out = scratch("mps");
  SolveArgs args;
  args.instance = kData / "fixture_instance.json";
  args.scenarios = kData / "fixture_scenarios.json";
  args.out_dir = out;
  args.options.method = Method::export_mps;
  std::ostringstream err;
  REQUIRE(cmd_solve(args, err) == kExitOk);
  CHECK(slurp(out / "model.mps") == slurp(kData / "fixture_model.mps"));
  CHECK_FALSE(fs::exists(out / "solution.json"));
  std::ifstream in(kData / "fixture_model.mps");
  MilpModel m = read_mps(in);
  CHECK(m.objective_name == "COST");
}

TEST_CASE("identical seeds and flags give identical files") {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const fs::path& out : {a, b}) {
    SolveArgs args;
    args.instance = kData / "fixture_instance.json";
    args.sample = 5;
    args.options.seed = 42;
    args.options.method = Method::diving;
    args.out_dir = out;
    std::ostringstream err;
    REQUIRE(cmd_solve(args, err) == kExitOk);
  }
  CHECK(slurp(a / "solution.json") == slurp(b / "solution.json"));
  Json ra = read_json_file(a / "report.json"), rb = read_json_file(b / "report.json");
  CHECK(ra.contains("timing"));
  CHECK(format_json(without_timing(ra)) == format_json(without_timing(rb)));
  CHECK(ra["scenarios"].get<int>() == 5);
}

TEST_CASE("exit codes and error documents") {
  std::ostringstream err;
  SolveArgs args;
  args.instance = kData / "does_not_exist.json";
  args.out_dir = scratch("missing");
  CHECK(cmd_solve(args, err) == kExitInput);
  Json e = parse_json(err.str());
  CHECK(e["schema"] == kErrorSchema);
  CHECK(e["error"] == "input");

  // Two overlapping legs with a single aircraft.
  Instance inst;
  Activity a;
  a.id = "L0";
  a.origin = "A";
  a.destination = "B";
  a.departure = 0;
  a.arrival = 60;
  inst.activities.push_back(a);
  a.id = "L1";
  a.departure = 10;
  a.arrival = 70;
  inst.activities.push_back(a);
  Aircraft k;
  k.id = "K0";
  k.leg_cost = {100, 100};
  inst.aircraft.push_back(k);
  fs::path dir = scratch("infeasible");
  write_text_file(dir / "instance.json", format_json(instance_to_json(inst)));
  args.instance = dir / "instance.json";
  args.out_dir = dir;
  for (Method m : {Method::exact, Method::diving, Method::rmh}) {
    std::ostringstream err2;
    args.options.method = m;
    INFO(method_name(m));
    CHECK(cmd_solve(args, err2) == kExitInfeasible);
    CHECK(parse_json(err2.str())["error"] == "infeasible");
    CHECK(read_json_file(dir / "report.json")["status"] == "infeasible");
  }
}

TEST_CASE("gantt chart") {
  Fixture f;
  SUBCASE("fixture solution matches the golden SVG") {
    Solution sol = solution_from_json(f.instance, read_json_file(kData / "fixture_solution.json"));
    std::string svg = gantt_svg(f.instance, sol);
    CHECK(svg == slurp(kData / "fixture_gantt.svg"));
    CHECK(count(svg, "<rect class=") == f.instance.activity_count());
    CHECK(count(svg, "<rect class=\"maintenance\"") == 1);
    CHECK(count(svg, "<g class=\"aircraft\">") == 2);
  }
  SUBCASE("empty solution draws the axes only") {
    Solution empty;
    std::string svg = gantt_svg(f.instance, empty);
    CHECK(count(svg, "<rect class=") == 0);
    CHECK(count(svg, "<g class=\"axes\">") == 1);
    CHECK(count(svg, "<line") > 2);
  }
  SUBCASE("unknown activities are rejected") {
    Solution bad;
    bad.routes = {{0, 99}};
    CHECK_THROWS_AS(gantt_svg(f.instance, bad), InputError);
  }
  SUBCASE("command writes the file") {
    fs::path out = scratch("gantt") / "chart.svg";
    std::ostringstream err;
    CHECK(cmd_gantt(kData / "fixture_solution.json", kData / "fixture_instance.json", out, {}, err) == kExitOk);
    CHECK(slurp(out) == slurp(kData / "fixture_gantt.svg"));
  }
}

TEST_CASE("generate command is deterministic") {
  fs::path a = scratch("gen_a"), b = scratch("gen_b");
  for (const fs::path& out : {a, b}) {
    GenerateArgs g;
    g.config = kData / "fixture_config.json";
    g.seed = 3;
    g.out_dir = out;
    std::ostringstream err;
    REQUIRE(cmd_generate(g, err) == kExitOk);
  }
  CHECK(slurp(a / "instance.json") == slurp(b / "instance.json"));
  CHECK(slurp(a / "scenarios.json") == slurp(b / "scenarios.json"));
  CHECK(slurp(a / "instance.json") == slurp(kData / "fixture_instance.json"));
  CHECK(slurp(a / "scenarios.json") == slurp(kData / "fixture_scenarios.json"));
}

TEST_CASE("bench tables") {
  fs::path dir = scratch("bench");
  write_text_file(dir / "bench.json", format_json(Json{
      {"schema", kBenchSchema},
      {"sizes", Json::array({Json{{"name", "tiny"},
                                  {"config", Json{{"aircraft", 2}, {"legs", 8}, {"airports", 3},
                                                  {"horizon_days", 1}, {"maintenances", 1}}}}})},
      {"scenarios", Json::array({2})},
      {"seeds", Json::array({5})},
      {"methods", Json::array({"diving"})},
      {"evaluation_scenarios", 20}}));
  std::ostringstream err;
  REQUIRE(cmd_bench(dir / "bench.json", dir / "out", err) == kExitOk);

  std::string table = slurp(dir / "out" / "tables.csv");
  CHECK(count(table, "\n") == 2);
  std::string runs = slurp(dir / "out" / "runs.csv");
  CHECK(count(runs, "\n") == 3);

  // Recompute the improvement from the raw files.
  std::istringstream in(runs);
  std::string header, det_line, dive_line;
  std::getline(in, header);
  std::getline(in, det_line);
  std::getline(in, dive_line);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  auto det = split(det_line), dive = split(dive_line);
  REQUIRE(det.size() == 16u);
  REQUIRE(dive.size() == 16u);
  Instance inst = instance_from_json(read_json_file(dir / "out" / "instances" / "tiny_s5.json"));
  Network net = preprocess(inst);
  ScenarioSet eval = scenarios_from_json(inst, read_json_file(dir / "out" / "scenarios" / "tiny_s5_eval.json"));
  CHECK(eval.size() == 20);
  double det_total = solution_cost(inst, net, solution_from_json(inst, read_json_file(dir / "out" / det[15])), eval).total;
  double dive_total = solution_cost(inst, net, solution_from_json(inst, read_json_file(dir / "out" / dive[15])), eval).total;
  double improvement = 100.0 * (det_total - dive_total) / det_total;
  CHECK(std::stod(dive[14]) == doctest::Approx(improvement).epsilon(1e-6));

  auto row = split(table.substr(table.find('\n') + 1, table.rfind('\n') - table.find('\n') - 1));
  REQUIRE(row.size() == 11u);
  CHECK(row[0] == "diving");
  CHECK(std::stod(row[7]) >= -1e-9);
  CHECK(std::stod(row[9]) == doctest::Approx(improvement).epsilon(1e-6));
}

TEST_CASE("bench rows aggregate") {
  std::vector<BenchRow> rows(2);
  for (int i = 0; i < 2; ++i) {
    rows[static_cast<std::size_t>(i)].size = "s";
    rows[static_cast<std::size_t>(i)].method = "diving";
    rows[static_cast<std::size_t>(i)].scenarios = 5;
    rows[static_cast<std::size_t>(i)].seconds = 1.0 + i;
    rows[static_cast<std::size_t>(i)].gap = 0.01 * i;
    rows[static_cast<std::size_t>(i)].cost = CostBreakdown{100, 50.0 + 10 * i, 150.0 + 10 * i};
    rows[static_cast<std::size_t>(i)].baseline_total = 200;
    rows[static_cast<std::size_t>(i)].baseline_delay = 100;
  }
  std::string t = bench_table_csv(rows);
  // Improvements 25% and 20%, delay 110 of 200.
  CHECK(t.substr(t.find('\n') + 1) ==
        "diving,s,5,2,2,1.500000,2.000000,0.005000,0.010000,22.500000,45.000000\n");
}
