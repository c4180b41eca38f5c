#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tail/io.hpp"
#include "tail/pricing.hpp"

namespace tail {

enum ExitCode : int { kExitOk = 0, kExitInfeasible = 2, kExitLimit = 3, kExitInput = 4 };

enum class Method { det, colgen, rmh, diving, exact, export_mps };

std::optional<Method> parse_method(std::string_view name);
const char* method_name(Method method);

struct SolveOptions {
  Method method = Method::diving;
  int taboo = 15;
  double time_limit = 3600.0;  ///< seconds, <= 0 disables
  MeetMode meet = MeetMode::convex;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct SolveOutcome {
  int exit_code = kExitOk;
  std::optional<Solution> solution;
  /// tail-report/1; wall-clock figures live under "timing" only.
  Json report;
  /// Error document when exit_code is nonzero.
  Json error;
  std::string mps;  ///< model text for export-mps
};

/// Runs one method. `training` drives the optimization; costs in the report
/// are evaluated under `evaluation`.
SolveOutcome run_solve(const Instance& instance, const Network& network, const ScenarioSet& training,
                       const ScenarioSet& evaluation, const SolveOptions& options);

/// Removes the "timing" object from a report.
Json without_timing(Json report);

/// Seed of an independent scenario stream derived from an instance seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);
inline constexpr std::uint64_t kTrainingStream = 1;
inline constexpr std::uint64_t kEvaluationStream = 2;

/// Trace verbosity from TA_LOG: 0 quiet (default), 1 info, 2 debug with the
/// column generation log, 3 trace with the diving trace. Accepts the numbers
/// or the names off, info, debug, trace.
int log_level();

struct GenerateArgs {
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
};
/// Writes instance.json and scenarios.json.
int cmd_generate(const GenerateArgs& args, std::ostream& err);

struct SolveArgs {
  std::filesystem::path instance;
  std::optional<std::filesystem::path> scenarios;
  /// Evaluation scenarios; the training scenarios when absent.
  std::optional<std::filesystem::path> evaluation;
  /// Scenarios drawn from `seed` when no scenario file is given.
  int sample = 10;
  std::filesystem::path out_dir = ".";
  SolveOptions options;
};
/// Writes solution.json (when a solution exists), report.json and, for
/// export-mps, model.mps. Errors go to `err` as tail-error/1 JSON.
int cmd_solve(const SolveArgs& args, std::ostream& err);

struct BenchRow {
  std::string size;
  std::uint64_t seed = 0;
  int scenarios = 0;
  std::string method;
  std::string status;
  double seconds = 0.0;
  std::optional<double> lower_bound, integer_value, gap;
  std::optional<CostBreakdown> cost;
  double baseline_total = 0.0;
  double baseline_delay = 0.0;
  std::string solution_file;
};

/// Runs every size x seed x scenario count x method of a tail-bench/1 config
/// sequentially and writes runs.csv, tables.csv and the solution files. The
/// deterministic baseline of each instance is a runs.csv row with zero
/// scenarios; tables.csv aggregates the configured methods only.
int cmd_bench(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& err);

/// Aggregates raw rows into the summary table text.
std::string bench_table_csv(const std::vector<BenchRow>& rows);
std::string bench_runs_csv(const std::vector<BenchRow>& rows);

struct GanttOptions {
  std::string hub = "HUB";
  double pixels_per_minute = 0.5;
};
/// One row per aircraft. Maintenances are grey; legs leaving the hub, legs
/// returning to it and other legs get distinct colors.
std::string gantt_svg(const Instance& instance, const Solution& solution, const GanttOptions& options = {});
int cmd_gantt(const std::filesystem::path& solution, const std::filesystem::path& instance,
              const std::filesystem::path& out, const GanttOptions& options, std::ostream& err);

}  // namespace tail
