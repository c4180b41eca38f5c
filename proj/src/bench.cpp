#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>

#include "tail/cli.hpp"
#include "tail/errors.hpp"
#include "tail/master.hpp"

namespace tail {

namespace {

struct BenchConfig {
  struct Size {
    std::string name;
    GenerateConfig config;
  };
  std::vector<Size> sizes;
  std::vector<int> scenarios{1, 5, 10, 50, 100};
  std::vector<std::uint64_t> seeds{1};
  std::vector<Method> methods{Method::diving};
  int evaluation_scenarios = 100;
  SolveOptions options;
};

BenchConfig bench_from_json(const Json& j) {
  if (!j.is_object() || j.value("schema", "") != std::string(kBenchSchema))
    throw InputError(std::string("bench config needs schema '") + kBenchSchema + "'");
  BenchConfig b;
  auto it = j.find("sizes");
  if (it == j.end() || !it->is_array() || it->empty()) throw InputError("bench config needs a non-empty 'sizes' array");
  for (const Json& s : *it) {
    if (!s.is_object() || !s.contains("name") || !s["name"].is_string())
      throw InputError("bench sizes need a 'name'");
    Json cfg = s.value("config", Json::object());
    if (!cfg.is_object()) throw InputError("bench size config must be an object");
    cfg["schema"] = kConfigSchema;
    b.sizes.push_back({s["name"].get<std::string>(), config_from_json(cfg)});
  }
  auto ints = [&](const char* key, auto& out) {
    auto f = j.find(key);
    if (f == j.end()) return;
    if (!f->is_array()) throw InputError(std::string("bench '") + key + "' must be an array");
    out.clear();
    for (const Json& x : *f) {
      if (!x.is_number_integer() || x.get<long long>() < 0)
        throw InputError(std::string("bench '") + key + "' holds non-negative integers");
      out.push_back(x.get<typename std::decay_t<decltype(out)>::value_type>());
    }
  };
  ints("scenarios", b.scenarios);
  ints("seeds", b.seeds);
  if (auto f = j.find("methods"); f != j.end()) {
    if (!f->is_array()) throw InputError("bench 'methods' must be an array");
    b.methods.clear();
    for (const Json& m : *f) {
      auto parsed = m.is_string() ? parse_method(m.get<std::string>()) : std::nullopt;
      if (!parsed || *parsed == Method::export_mps || *parsed == Method::det)
        throw InputError("bench methods are colgen, rmh, diving or exact");
      b.methods.push_back(*parsed);
    }
  }
  b.evaluation_scenarios = j.value("evaluation_scenarios", b.evaluation_scenarios);
  b.options.taboo = j.value("taboo", b.options.taboo);
  b.options.time_limit = j.value("time_limit", b.options.time_limit);
  b.options.threads = j.value("threads", b.options.threads);
  std::string meet = j.value("meet", std::string("convex"));
  if (meet != "convex" && meet != "exact") throw InputError("bench 'meet' is convex or exact");
  b.options.meet = meet == "convex" ? MeetMode::convex : MeetMode::exact;
  if (b.scenarios.empty() || b.seeds.empty() || b.methods.empty())
    throw InputError("bench needs scenario counts, seeds and methods");
  if (std::find(b.scenarios.begin(), b.scenarios.end(), 0) != b.scenarios.end())
    throw InputError("bench scenario counts must be positive");
  if (b.evaluation_scenarios < 1) throw InputError("bench needs at least one evaluation scenario");
  return b;
}

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : ""; }

std::optional<double> json_number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

bool solved(const BenchRow& r) { return r.cost.has_value(); }

double improvement_pct(const BenchRow& r) {
  return 100.0 * (r.baseline_total - r.cost->total) / r.baseline_total;
}

}  // namespace

std::string bench_runs_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "size,seed,scenarios,method,status,seconds,lower_bound,integer_value,gap,operational,delay,total,"
      "baseline_total,baseline_delay,improvement_pct,solution\n";
  for (const BenchRow& r : rows) {
    out += r.size + "," + std::to_string(r.seed) + "," + std::to_string(r.scenarios) + "," + r.method + "," +
           r.status + "," + num(r.seconds) + "," + opt_num(r.lower_bound) + "," + opt_num(r.integer_value) + "," +
           opt_num(r.gap) + ",";
    if (r.cost)
      out += num(r.cost->operational) + "," + num(r.cost->delay) + "," + num(r.cost->total) + ",";
    else
      out += ",,,";
    out += num(r.baseline_total) + "," + num(r.baseline_delay) + "," + (r.cost ? num(improvement_pct(r)) : "") +
           "," + r.solution_file + "\n";
  }
  return out;
}

std::string bench_table_csv(const std::vector<BenchRow>& rows) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<const BenchRow*>> groups;
  std::vector<std::tuple<std::string, std::string, int>> order;
  for (const BenchRow& r : rows) {
    auto key = std::make_tuple(r.method, r.size, r.scenarios);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::string out =
      "method,size,scenarios,runs,solved,avg_time,max_time,avg_gap,max_gap,avg_improvement_pct,"
      "delay_reduction_pct\n";
  for (const auto& key : order) {
    const auto& g = groups[key];
    int n = 0;
    double sum_t = 0, max_t = 0, sum_gap = 0, max_gap = 0, sum_imp = 0, delay = 0, base_delay = 0;
    int gaps = 0;
    for (const BenchRow* r : g) {
      sum_t += r->seconds;
      max_t = std::max(max_t, r->seconds);
      if (!solved(*r)) continue;
      ++n;
      if (r->gap) {
        sum_gap += *r->gap;
        max_gap = gaps ? std::max(max_gap, *r->gap) : *r->gap;
        ++gaps;
      }
      sum_imp += improvement_pct(*r);
      delay += r->cost->delay;
      base_delay += r->baseline_delay;
    }
    const auto& [method, size, scenarios] = key;
    out += method + "," + size + "," + std::to_string(scenarios) + "," + std::to_string(g.size()) + "," +
           std::to_string(n) + "," + num(sum_t / static_cast<double>(g.size())) + "," + num(max_t) + "," +
           (gaps ? num(sum_gap / gaps) : "") + "," + (gaps ? num(max_gap) : "") + "," +
           (n ? num(sum_imp / n) : "") + "," + (n && base_delay > 0 ? num(100.0 * (1.0 - delay / base_delay)) : "") +
           "\n";
  }
  return out;
}

int cmd_bench(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& err) {
  BenchConfig cfg;
  try {
    cfg = bench_from_json(read_json_file(config));
  } catch (const InputError& e) {
    err << format_json(Json{{"schema", kErrorSchema}, {"error", "input"}, {"message", e.what()}});
    return kExitInput;
  }
  std::vector<BenchRow> rows;
  const int max_scenarios = *std::max_element(cfg.scenarios.begin(), cfg.scenarios.end());
  for (const auto& size : cfg.sizes) {
    for (std::uint64_t seed : cfg.seeds) {
      const std::string tag = size.name + "_s" + std::to_string(seed);
      BenchRow base;
      base.size = size.name;
      base.seed = seed;
      base.method = "det";
      Instance inst;
      Network net;
      ScenarioSet training, evaluation;
      try {
        inst = generate_instance(size.config.instance, seed);
        net = preprocess(inst);
        training = generate_scenarios(inst, max_scenarios, stream_seed(seed, kTrainingStream), size.config.distribution);
        evaluation = generate_scenarios(inst, cfg.evaluation_scenarios, stream_seed(seed, kEvaluationStream),
                                        size.config.distribution);
      } catch (const Error& e) {
        base.status = std::string("error: ") + e.what();
        for (char& c : base.status)
          if (c == ',' || c == '\n') c = ';';
        rows.push_back(base);
        continue;
      }
      write_text_file(out_dir / "instances" / (tag + ".json"), format_json(instance_to_json(inst)));
      write_text_file(out_dir / "scenarios" / (tag + "_eval.json"), format_json(scenarios_to_json(inst, evaluation)));

      SolveOptions det_opt = cfg.options;
      det_opt.method = Method::det;
      det_opt.seed = seed;
      auto det = run_solve(inst, net, ScenarioSet(), evaluation, det_opt);
      base.status = det.report["status"].get<std::string>();
      base.seconds = det.report["timing"]["total"].get<double>();
      base.lower_bound = json_number(det.report, "lower_bound");
      base.integer_value = json_number(det.report, "integer_value");
      base.gap = json_number(det.report, "gap");
      if (det.solution) {
        base.cost = solution_cost(inst, net, *det.solution, evaluation);
        base.baseline_total = base.cost->total;
        base.baseline_delay = base.cost->delay;
        base.solution_file = "solutions/" + tag + "_det.json";
        write_text_file(out_dir / base.solution_file, format_json(solution_to_json(inst, *det.solution)));
      }
      rows.push_back(base);
      if (log_level() >= 1) err << "[bench] " << tag << " det " << base.status << "\n";

      for (int count : cfg.scenarios) {
        ScenarioSet sc = training.head(count);
        for (Method m : cfg.methods) {
          BenchRow row;
          row.size = size.name;
          row.seed = seed;
          row.scenarios = count;
          row.method = method_name(m);
          row.baseline_total = base.baseline_total;
          row.baseline_delay = base.baseline_delay;
          SolveOptions o = cfg.options;
          o.method = m;
          o.seed = seed;
          auto res = run_solve(inst, net, sc, evaluation, o);
          row.status = res.report["status"].get<std::string>();
          row.seconds = res.report["timing"]["total"].get<double>();
          row.lower_bound = json_number(res.report, "lower_bound");
          row.integer_value = json_number(res.report, "integer_value");
          row.gap = json_number(res.report, "gap");
          if (res.solution && base.cost) {
            row.cost = solution_cost(inst, net, *res.solution, evaluation);
            row.solution_file = "solutions/" + tag + "_n" + std::to_string(count) + "_" + row.method + ".json";
            write_text_file(out_dir / row.solution_file, format_json(solution_to_json(inst, *res.solution)));
          }
          if (log_level() >= 1) err << "[bench] " << tag << " n" << count << " " << row.method << " " << row.status << "\n";
          rows.push_back(std::move(row));
        }
      }
    }
  }
  write_text_file(out_dir / "runs.csv", bench_runs_csv(rows));
  std::vector<BenchRow> methods;
  for (const BenchRow& r : rows)
    if (r.scenarios > 0) methods.push_back(r);
  write_text_file(out_dir / "tables.csv", bench_table_csv(methods));
  return kExitOk;
}

}  // namespace tail
