#include "tail/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "tail/errors.hpp"
#include "tail/exact.hpp"
#include "tail/heuristics.hpp"
#include "tail/master.hpp"
#include "tail/milp.hpp"

namespace tail {

std::optional<Method> parse_method(std::string_view name) {
  if (name == "det") return Method::det;
  if (name == "colgen") return Method::colgen;
  if (name == "rmh") return Method::rmh;
  if (name == "diving") return Method::diving;
  if (name == "exact") return Method::exact;
  if (name == "export-mps") return Method::export_mps;
  return std::nullopt;
}

const char* method_name(Method method) {
  switch (method) {
    case Method::det: return "det";
    case Method::colgen: return "colgen";
    case Method::rmh: return "rmh";
    case Method::diving: return "diving";
    case Method::exact: return "exact";
    case Method::export_mps: return "export-mps";
  }
  return "?";
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ull + stream * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int log_level() {
  const char* v = std::getenv("TA_LOG");
  if (!v) return 0;
  std::string s(v);
  if (s == "info") return 1;
  if (s == "debug") return 2;
  if (s == "trace") return 3;
  if (s.size() == 1 && s[0] >= '0' && s[0] <= '9') return s[0] - '0';
  return 0;
}

namespace {

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

Json cost_json(const CostBreakdown& c) {
  return Json{{"operational", c.operational}, {"delay", c.delay}, {"total", c.total}};
}

Json error_json(const char* kind, const std::string& message) {
  return Json{{"schema", kErrorSchema}, {"error", kind}, {"message", message}};
}

std::string scenario_digest(const Instance& inst, const ScenarioSet& sc) {
  return fnv1a_hex(format_json(scenarios_to_json(inst, sc)));
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[tail] " << msg << "\n";
}

}  // namespace

Json without_timing(Json report) {
  report.erase("timing");
  return report;
}

SolveOutcome run_solve(const Instance& instance, const Network& network, const ScenarioSet& training,
                       const ScenarioSet& evaluation, const SolveOptions& options) {
  SolveOutcome out;
  const double start = steady_seconds();
  Json phases = Json::object();
  Json stats = Json::object();
  std::optional<double> lower, value;
  std::string status;
  bool limit = false;

  ColgenOptions cgo;
  cgo.meet = options.meet;
  cgo.threads = options.threads;
  cgo.time_limit = options.time_limit;
  if (log_level() >= 2) cgo.log = &std::cerr;
  DivingOptions dvo;
  dvo.taboo = options.taboo;
  dvo.time_limit = options.time_limit;
  if (log_level() >= 3) dvo.trace = &std::cerr;

  info(std::string("solving with ") + method_name(options.method));
  try {
    double t = steady_seconds();
    switch (options.method) {
      case Method::det: {
        DeterministicOptions d;
        d.colgen = cgo;
        d.diving = dvo;
        auto r = deterministic_solve(instance, network, d);
        out.solution = r.solution;
        lower = r.lower_bound;
        value = r.operational;
        status = r.exact ? "optimal" : "feasible";
        stats["enumerated"] = r.exact;
        phases["solve"] = steady_seconds() - t;
        break;
      }
      case Method::colgen: {
        ColumnGeneration cg(instance, network, training, cgo);
        auto st = cg.run(Residual::root(instance, network));
        phases["colgen"] = steady_seconds() - t;
        lower = st.lower_bound;
        stats["iterations"] = st.iterations;
        stats["columns"] = cg.pool().size();
        stats["lp_value"] = st.lp_value;
        stats["converged"] = st.converged;
        if (st.converged && !st.feasible) throw InfeasibleError("the master LP needs artificial columns");
        limit = st.limit_hit;
        status = limit ? "limit" : "lp_optimal";
        break;
      }
      case Method::rmh: {
        ColumnGeneration cg(instance, network, training, cgo);
        auto st = cg.run(Residual::root(instance, network));
        phases["colgen"] = steady_seconds() - t;
        lower = st.lower_bound;
        stats["iterations"] = st.iterations;
        stats["columns"] = cg.pool().size();
        if (st.converged && !st.feasible) throw InfeasibleError("the master LP needs artificial columns");
        RmhOptions ro;
        if (options.time_limit > 0)
          ro.time_limit = std::max(1e-3, options.time_limit - (steady_seconds() - start));
        t = steady_seconds();
        auto r = restricted_master_heuristic(cg, ro);
        phases["heuristic"] = steady_seconds() - t;
        stats["nodes"] = r.nodes;
        limit = st.limit_hit || r.limit_hit;
        if (!r.best) {
          if (limit) throw LimitError("no integer solution within the limits");
          throw InfeasibleError("the restricted master has no integer solution");
        }
        out.solution = r.best->solution;
        value = r.best->cost.total;
        status = limit ? "limit" : "feasible";
        break;
      }
      case Method::diving: {
        ColumnGeneration cg(instance, network, training, cgo);
        auto d = diving(cg, dvo);
        phases["diving"] = steady_seconds() - t;
        lower = d.root_bound;
        stats["nodes"] = d.nodes;
        stats["backtracks"] = d.backtracks;
        stats["taboo"] = static_cast<int>(d.taboo.size());
        stats["taboo_exceeded"] = d.taboo_exceeded;
        stats["root_converged"] = d.root_converged;
        stats["columns"] = cg.pool().size();
        limit = d.time_limit_hit;
        if (!d.best) {
          if (limit) throw LimitError("no integer solution within the time limit");
          throw InfeasibleError(d.taboo_exceeded ? "taboo list exceeded without a solution"
                                                 : "diving found no solution");
        }
        out.solution = d.best->solution;
        value = d.best->cost.total;
        status = limit ? "limit" : "feasible";
        break;
      }
      case Method::exact: {
        auto r = exact_solve(instance, network, training);
        phases["solve"] = steady_seconds() - t;
        out.solution = r.solution;
        lower = value = r.cost.total;
        stats["nodes"] = r.nodes;
        status = "optimal";
        break;
      }
      case Method::export_mps: {
        CompactLayout layout;
        MilpModel m = compact_milp(instance, network, training, &layout);
        std::ostringstream mps;
        write_mps(m, mps);
        out.mps = mps.str();
        phases["export"] = steady_seconds() - t;
        stats["variables"] = static_cast<int>(m.variables.size());
        stats["rows"] = static_cast<int>(m.rows.size());
        stats["arc_variables"] = layout.arc_variables;
        stats["delay_variables"] = layout.delay_variables;
        stats["split_variables"] = layout.split_variables;
        status = "exported";
        break;
      }
    }
  } catch (const InfeasibleError& e) {
    out.exit_code = kExitInfeasible;
    out.error = error_json("infeasible", e.what());
    status = "infeasible";
  } catch (const LimitError& e) {
    out.exit_code = kExitInfeasible;
    out.error = error_json("limit", e.what());
    status = "limit";
  }

  std::optional<double> gap;
  if (lower && value) {
    double denom = std::abs(*lower);
    gap = denom > 0 ? (*value - *lower) / denom : 0.0;
  }
  Json cost = nullptr;
  if (out.solution) {
    double t = steady_seconds();
    cost = cost_json(solution_cost(instance, network, *out.solution, evaluation));
    phases["evaluate"] = steady_seconds() - t;
    if (limit) out.exit_code = kExitLimit;
  }

  out.report = Json{{"schema", kReportSchema},
                    {"method", method_name(options.method)},
                    {"status", status},
                    {"seed", options.seed},
                    {"instance_digest", instance_digest(instance)},
                    {"training_digest", scenario_digest(instance, training)},
                    {"evaluation_digest", scenario_digest(instance, evaluation)},
                    {"scenarios", training.size()},
                    {"evaluation_scenarios", evaluation.size()},
                    {"options", Json{{"taboo", options.taboo},
                                     {"time_limit", options.time_limit},
                                     {"meet", options.meet == MeetMode::convex ? "convex" : "exact"},
                                     {"threads", options.threads}}},
                    {"lower_bound", optional_number(lower)},
                    {"integer_value", optional_number(value)},
                    {"gap", optional_number(gap)},
                    {"cost", cost},
                    {"stats", stats},
                    {"timing", Json{{"total", steady_seconds() - start}, {"phases", phases}}}};
  info(std::string("status ") + status);
  return out;
}

int cmd_generate(const GenerateArgs& args, std::ostream& err) {
  try {
    GenerateConfig cfg;
    if (args.config) cfg = config_from_json(read_json_file(*args.config));
    Instance inst = generate_instance(cfg.instance, args.seed);
    ScenarioSet sc = generate_scenarios(inst, cfg.scenarios, stream_seed(args.seed, kTrainingStream), cfg.distribution);
    write_text_file(args.out_dir / "instance.json", format_json(instance_to_json(inst)));
    write_text_file(args.out_dir / "scenarios.json", format_json(scenarios_to_json(inst, sc)));
    return kExitOk;
  } catch (const InputError& e) {
    err << format_json(error_json("input", e.what()));
    return kExitInput;
  }
}

int cmd_solve(const SolveArgs& args, std::ostream& err) {
  Instance inst;
  ScenarioSet training, evaluation;
  Network net;
  try {
    inst = instance_from_json(read_json_file(args.instance));
    if (args.scenarios) {
      training = scenarios_from_json(inst, read_json_file(*args.scenarios));
    } else {
      if (args.sample < 0) throw InputError("--sample must be non-negative");
      if (args.sample > 0)
        training = generate_scenarios(inst, args.sample, stream_seed(args.options.seed, kTrainingStream));
    }
    evaluation = args.evaluation ? scenarios_from_json(inst, read_json_file(*args.evaluation)) : training;
  } catch (const InputError& e) {
    err << format_json(error_json("input", e.what()));
    return kExitInput;
  }
  try {
    net = preprocess(inst);
  } catch (const InfeasibleError& e) {
    err << format_json(error_json("infeasible", e.what()));
    return kExitInfeasible;
  } catch (const InputError& e) {
    err << format_json(error_json("input", e.what()));
    return kExitInput;
  }
  SolveOutcome out = run_solve(inst, net, training, evaluation, args.options);
  try {
    if (out.solution)
      write_text_file(args.out_dir / "solution.json", format_json(solution_to_json(inst, *out.solution)));
    if (!out.mps.empty()) write_text_file(args.out_dir / "model.mps", out.mps);
    write_text_file(args.out_dir / "report.json", format_json(out.report));
  } catch (const InputError& e) {
    err << format_json(error_json("input", e.what()));
    return kExitInput;
  }
  if (!out.error.is_null()) err << format_json(out.error);
  return out.exit_code;
}

int cmd_gantt(const std::filesystem::path& solution, const std::filesystem::path& instance,
              const std::filesystem::path& out, const GanttOptions& options, std::ostream& err) {
  try {
    Instance inst = instance_from_json(read_json_file(instance));
    Solution sol = solution_from_json(inst, read_json_file(solution));
    write_text_file(out, gantt_svg(inst, sol, options));
    return kExitOk;
  } catch (const InputError& e) {
    err << format_json(error_json("input", e.what()));
    return kExitInput;
  }
}

}  // namespace tail
