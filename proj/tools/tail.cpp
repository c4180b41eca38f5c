#include <CLI11.hpp>

#include <iostream>

#include "tail/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic tail assignment: generator, solvers, benchmark and Gantt charts"};
  app.require_subcommand(1);

  tail::GenerateArgs gen;
  std::string gen_config;
  auto* generate = app.add_subcommand("generate", "Write a synthetic instance.json and scenarios.json");
  generate->add_option("--config", gen_config, "tail-config/1 JSON file (defaults otherwise)")->check(CLI::ExistingFile);
  generate->add_option("--seed", gen.seed, "Random seed")->default_val(0);
  generate->add_option("--out", gen.out_dir, "Output directory")->default_val(".");

  tail::SolveArgs solve;
  std::string scenarios, evaluation, method = "diving", meet = "convex";
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance and write solution.json and report.json");
  solve_cmd->add_option("instance", solve.instance, "tail-instance/1 JSON file")->required();
  solve_cmd->add_option("--scenarios", scenarios, "tail-scenarios/1 JSON file for the optimization");
  solve_cmd->add_option("--eval", evaluation, "tail-scenarios/1 JSON file for the reported costs");
  solve_cmd->add_option("--sample", solve.sample, "Scenarios drawn from --seed when --scenarios is absent")
      ->default_val(10);
  solve_cmd->add_option("--method", method, "det, colgen, rmh, diving, exact or export-mps")
      ->check(CLI::IsMember({"det", "colgen", "rmh", "diving", "exact", "export-mps"}))
      ->default_val("diving");
  solve_cmd->add_option("--taboo", solve.options.taboo, "Taboo list size of the dive")->default_val(15);
  solve_cmd->add_option("--time-limit", solve.options.time_limit, "Seconds, 0 for none")->default_val(3600);
  solve_cmd->add_option("--meet", meet, "Backward bound meet: convex or exact")
      ->check(CLI::IsMember({"convex", "exact"}))
      ->default_val("convex");
  solve_cmd->add_option("--threads", solve.options.threads, "Pricing threads")->default_val(1)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", solve.options.seed, "Seed recorded in the report and used by --sample")->default_val(0);
  solve_cmd->add_option("--out", solve.out_dir, "Output directory")->default_val(".");

  std::string bench_config, bench_out = "bench";
  auto* bench = app.add_subcommand("bench", "Run a tail-bench/1 matrix and write CSV tables");
  bench->add_option("config", bench_config, "tail-bench/1 JSON file")->required();
  bench->add_option("--out", bench_out, "Output directory")->default_val("bench");

  std::string g_solution, g_instance, g_out = "gantt.svg";
  tail::GanttOptions g_opt;
  auto* gantt = app.add_subcommand("gantt", "Draw a solution as an SVG Gantt chart");
  gantt->add_option("solution", g_solution, "tail-solution/1 JSON file")->required();
  gantt->add_option("instance", g_instance, "tail-instance/1 JSON file")->required();
  gantt->add_option("--out", g_out, "SVG file")->default_val("gantt.svg");
  gantt->add_option("--hub", g_opt.hub, "Hub airport for leg colors")->default_val("HUB");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : tail::kExitInput;
  }

  if (*generate) {
    if (!gen_config.empty()) gen.config = gen_config;
    return tail::cmd_generate(gen, std::cerr);
  }
  if (*solve_cmd) {
    if (!scenarios.empty()) solve.scenarios = scenarios;
    if (!evaluation.empty()) solve.evaluation = evaluation;
    solve.options.method = *tail::parse_method(method);
    solve.options.meet = meet == "exact" ? tail::MeetMode::exact : tail::MeetMode::convex;
    return tail::cmd_solve(solve, std::cerr);
  }
  if (*bench) return tail::cmd_bench(bench_config, bench_out, std::cerr);
  return tail::cmd_gantt(g_solution, g_instance, g_out, g_opt, std::cerr);
}
