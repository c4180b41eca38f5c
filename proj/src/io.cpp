#include "tail/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "tail/errors.hpp"

namespace tail {

namespace {

bool scalar(const Json& v) { return !v.is_array() && !v.is_object(); }

void format_into(const Json& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    std::size_t i = 0;
    for (auto it = v.begin(); it != v.end(); ++it, ++i) {
      out += pad;
      out += Json(it.key()).dump();
      out += ": ";
      format_into(it.value(), indent + 2, out);
      out += i + 1 < v.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    if (std::all_of(v.begin(), v.end(), scalar)) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i].dump();
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      out += pad;
      format_into(v[i], indent + 2, out);
      out += i + 1 < v.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "]";
  } else {
    out += v.dump();
  }
}

[[noreturn]] void fail(const std::string& what) { throw InputError(what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

void check_schema(const Json& json, const char* schema) {
  if (!json.is_object()) fail(std::string("expected a ") + schema + " object");
  const Json& tag = field(json, "schema", "document");
  if (!tag.is_string() || tag.get<std::string>() != schema)
    fail(std::string("schema tag must be '") + schema + "'");
}

std::string get_string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) fail(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where + " must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + " must be finite");
  return x;
}

double get_number(const Json& obj, const char* key, const std::string& where) {
  return get_number(field(obj, key, where), where + "." + key);
}

double get_minutes(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer number of minutes");
  return static_cast<double>(v.get<std::int64_t>());
}

const Json& get_array(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_array()) fail(where + ": '" + key + "' must be an array");
  return v;
}

std::int64_t whole_minutes(double t, const std::string& what) {
  if (t != std::round(t) || !std::isfinite(t)) fail(what + " is not a whole number of minutes");
  return static_cast<std::int64_t>(t);
}

int activity_ref(const Instance& inst, const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where + " must be an activity id");
  auto a = inst.find_activity(v.get<std::string>());
  if (!a) fail(where + ": unknown activity '" + v.get<std::string>() + "'");
  return *a;
}

Json pwl_to_json(const PwlFunction& f) {
  Json points = Json::array();
  for (const Breakpoint& b : f.breakpoints()) points.push_back(Json::array({b.x, b.y}));
  return Json{{"breakpoints", points}, {"left_slope", f.left_slope()}, {"right_slope", f.right_slope()}};
}

PwlFunction pwl_from_json(const Json& j) {
  const std::string where = "delay_cost";
  if (!j.is_object()) fail(where + " must be an object");
  std::vector<Breakpoint> points;
  for (const Json& p : get_array(j, "breakpoints", where)) {
    if (!p.is_array() || p.size() != 2) fail(where + ": breakpoints are [x, y] pairs");
    points.push_back({get_number(p[0], where + " x"), get_number(p[1], where + " y")});
  }
  if (points.empty()) fail(where + ": needs at least one breakpoint");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].x > points[i - 1].x)) fail(where + ": breakpoints must increase in x");
  PwlFunction f(std::move(points), get_number(j, "left_slope", where), get_number(j, "right_slope", where));
  if (!f.is_convex() || !f.is_nondecreasing()) fail(where + " must be convex and nondecreasing");
  return f;
}

}  // namespace

std::string format_json(const Json& value) {
  std::string out;
  format_into(value, 0, out);
  out += "\n";
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json(ss.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

Json instance_to_json(const Instance& inst) {
  Json acts = Json::array();
  for (const Activity& a : inst.activities) {
    acts.push_back(Json{{"id", a.id},
                        {"kind", a.is_leg() ? "leg" : "maintenance"},
                        {"origin", a.origin},
                        {"destination", a.destination},
                        {"departure", whole_minutes(a.departure, a.id + " departure")},
                        {"arrival", whole_minutes(a.arrival, a.id + " arrival")},
                        {"min_turn", whole_minutes(a.min_turn, a.id + " min_turn")},
                        {"sched_turn", whole_minutes(a.sched_turn, a.id + " sched_turn")}});
  }
  Json fleet = Json::array();
  for (const Aircraft& ac : inst.aircraft) {
    Json maint = Json::array();
    for (int m : ac.maintenances) maint.push_back(inst.activities[static_cast<std::size_t>(m)].id);
    std::vector<std::pair<std::uint64_t, double>> conn(ac.connection_cost.begin(), ac.connection_cost.end());
    std::sort(conn.begin(), conn.end());
    Json costs = Json::array();
    for (auto [key, cost] : conn) {
      int u = static_cast<int>(key >> 32);
      int v = static_cast<int>(key & 0xffffffffu);
      costs.push_back(Json::array({inst.vertex_name(u), inst.vertex_name(v), cost}));
    }
    Json leg_cost = Json::array();
    for (double c : ac.leg_cost) leg_cost.push_back(c);
    fleet.push_back(Json{{"id", ac.id},
                         {"first_activity", ac.first_activity
                                                ? Json(inst.activities[static_cast<std::size_t>(*ac.first_activity)].id)
                                                : Json(nullptr)},
                         {"maintenances", maint},
                         {"activity_cost", leg_cost},
                         {"default_connection_cost", ac.default_connection_cost},
                         {"connection_costs", costs}});
  }
  Json mandatory = Json::array();
  for (auto [u, v] : inst.mandatory_connections)
    mandatory.push_back(Json::array({inst.activities[static_cast<std::size_t>(u)].id,
                                     inst.activities[static_cast<std::size_t>(v)].id}));
  return Json{{"schema", kInstanceSchema},
              {"epoch", inst.epoch},
              {"delay_cost", pwl_to_json(inst.delay_cost)},
              {"charge_maintenance_delay", inst.charge_maintenance_delay},
              {"activities", acts},
              {"aircraft", fleet},
              {"mandatory_connections", mandatory}};
}

Instance instance_from_json(const Json& json) {
  check_schema(json, kInstanceSchema);
  Instance inst;
  inst.epoch = get_string(json, "epoch", "instance");
  inst.delay_cost = pwl_from_json(field(json, "delay_cost", "instance"));
  if (auto it = json.find("charge_maintenance_delay"); it != json.end()) {
    if (!it->is_boolean()) fail("charge_maintenance_delay must be a boolean");
    inst.charge_maintenance_delay = it->get<bool>();
  }
  for (const Json& a : get_array(json, "activities", "instance")) {
    if (!a.is_object()) fail("activities must be objects");
    Activity act;
    act.id = get_string(a, "id", "activity");
    const std::string where = "activity " + act.id;
    std::string kind = get_string(a, "kind", where);
    if (kind == "leg")
      act.kind = ActivityKind::leg;
    else if (kind == "maintenance")
      act.kind = ActivityKind::maintenance;
    else
      fail(where + ": kind must be 'leg' or 'maintenance'");
    act.origin = get_string(a, "origin", where);
    act.destination = get_string(a, "destination", where);
    act.departure = get_minutes(a, "departure", where);
    act.arrival = get_minutes(a, "arrival", where);
    act.min_turn = get_minutes(a, "min_turn", where);
    act.sched_turn = get_minutes(a, "sched_turn", where);
    inst.activities.push_back(std::move(act));
  }
  for (const Json& k : get_array(json, "aircraft", "instance")) {
    if (!k.is_object()) fail("aircraft must be objects");
    Aircraft ac;
    ac.id = get_string(k, "id", "aircraft");
    const std::string where = "aircraft " + ac.id;
    const Json& first = field(k, "first_activity", where);
    if (!first.is_null()) ac.first_activity = activity_ref(inst, first, where + ".first_activity");
    for (const Json& m : get_array(k, "maintenances", where))
      ac.maintenances.push_back(activity_ref(inst, m, where + ".maintenances"));
    const Json& costs = get_array(k, "activity_cost", where);
    if (costs.size() != inst.activities.size()) fail(where + ": activity_cost needs one entry per activity");
    for (const Json& c : costs) ac.leg_cost.push_back(get_number(c, where + ".activity_cost"));
    ac.default_connection_cost = get_number(k, "default_connection_cost", where);
    for (const Json& c : get_array(k, "connection_costs", where)) {
      if (!c.is_array() || c.size() != 3 || !c[0].is_string() || !c[1].is_string())
        fail(where + ": connection_costs are [from, to, cost] triples");
      auto vertex = [&](const Json& v) {
        std::string s = v.get<std::string>();
        if (s == "source") return inst.source();
        if (s == "sink") return inst.sink();
        return activity_ref(inst, v, where + ".connection_costs");
      };
      auto key = Aircraft::arc_key(vertex(c[0]), vertex(c[1]));
      if (!ac.connection_cost.emplace(key, get_number(c[2], where + ".connection_costs")).second)
        fail(where + ": duplicate connection cost");
    }
    inst.aircraft.push_back(std::move(ac));
  }
  if (auto it = json.find("mandatory_connections"); it != json.end()) {
    if (!it->is_array()) fail("mandatory_connections must be an array");
    for (const Json& p : *it) {
      if (!p.is_array() || p.size() != 2) fail("mandatory_connections are [from, to] pairs");
      inst.mandatory_connections.emplace_back(activity_ref(inst, p[0], "mandatory connection"),
                                              activity_ref(inst, p[1], "mandatory connection"));
    }
  }
  inst.validate();
  return inst;
}

Json scenarios_to_json(const Instance& inst, const ScenarioSet& sc) {
  Json ids = Json::array();
  for (const Activity& a : inst.activities) ids.push_back(a.id);
  Json rows = Json::array();
  for (int s = 0; s < sc.size(); ++s) {
    Json dep = Json::array(), arr = Json::array();
    for (int v = 0; v < sc.activity_count(); ++v) {
      dep.push_back(sc.departure(s, v));
      arr.push_back(sc.arrival(s, v));
    }
    rows.push_back(Json{{"departure", dep}, {"arrival", arr}});
  }
  return Json{{"schema", kScenarioSchema}, {"activities", ids}, {"scenarios", rows}};
}

ScenarioSet scenarios_from_json(const Instance& inst, const Json& json) {
  check_schema(json, kScenarioSchema);
  const Json& ids = get_array(json, "activities", "scenarios");
  const int n = inst.activity_count();
  if (static_cast<int>(ids.size()) != n) fail("scenarios: activity list does not match the instance");
  std::vector<int> column(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int v = activity_ref(inst, ids[static_cast<std::size_t>(i)], "scenarios.activities");
    if (seen[static_cast<std::size_t>(v)]) fail("scenarios: duplicate activity id");
    seen[static_cast<std::size_t>(v)] = 1;
    column[static_cast<std::size_t>(i)] = v;
  }
  const Json& rows = get_array(json, "scenarios", "scenarios");
  std::vector<double> dep(rows.size() * static_cast<std::size_t>(n)), arr(dep.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const std::string where = "scenario " + std::to_string(s);
    if (!rows[s].is_object()) fail(where + " must be an object");
    const Json& d = get_array(rows[s], "departure", where);
    const Json& a = get_array(rows[s], "arrival", where);
    if (static_cast<int>(d.size()) != n || static_cast<int>(a.size()) != n)
      fail(where + ": needs one delay per activity");
    for (int i = 0; i < n; ++i) {
      std::size_t at = s * static_cast<std::size_t>(n) + static_cast<std::size_t>(column[static_cast<std::size_t>(i)]);
      dep[at] = get_number(d[static_cast<std::size_t>(i)], where + " departure");
      arr[at] = get_number(a[static_cast<std::size_t>(i)], where + " arrival");
    }
  }
  return ScenarioSet(n, std::move(dep), std::move(arr));
}

Json solution_to_json(const Instance& inst, const Solution& sol) {
  Json routes = Json::array();
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    Json acts = Json::array();
    for (int v : sol.routes[k]) acts.push_back(inst.activities[static_cast<std::size_t>(v)].id);
    routes.push_back(Json{{"aircraft", inst.aircraft[k].id}, {"activities", acts}});
  }
  return Json{{"schema", kSolutionSchema}, {"routes", routes}};
}

Solution solution_from_json(const Instance& inst, const Json& json) {
  check_schema(json, kSolutionSchema);
  Solution sol;
  sol.routes.resize(inst.aircraft.size());
  std::vector<char> seen(inst.aircraft.size(), 0);
  for (const Json& r : get_array(json, "routes", "solution")) {
    if (!r.is_object()) fail("solution routes must be objects");
    std::string id = get_string(r, "aircraft", "route");
    auto k = inst.find_aircraft(id);
    if (!k) fail("solution: unknown aircraft '" + id + "'");
    if (seen[static_cast<std::size_t>(*k)]) fail("solution: aircraft '" + id + "' listed twice");
    seen[static_cast<std::size_t>(*k)] = 1;
    for (const Json& a : get_array(r, "activities", "route " + id))
      sol.routes[static_cast<std::size_t>(*k)].push_back(activity_ref(inst, a, "route " + id));
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) fail("solution: aircraft '" + inst.aircraft[k].id + "' has no route");
  return sol;
}

namespace {

template <class F>
void config_fields(GenerateConfig& c, F&& f) {
  InstanceConfig& i = c.instance;
  f("aircraft", &i.aircraft);
  f("legs", &i.legs);
  f("airports", &i.airports);
  f("horizon_days", &i.horizon_days);
  f("maintenances", &i.maintenances);
  f("mandatory_connections", &i.mandatory_connections);
  f("block_time_min", &i.block_time_min);
  f("block_time_max", &i.block_time_max);
  f("min_turn_min", &i.min_turn_min);
  f("min_turn_max", &i.min_turn_max);
  f("sched_extra_min", &i.sched_extra_min);
  f("sched_extra_max", &i.sched_extra_max);
  f("ground_extra_min", &i.ground_extra_min);
  f("ground_extra_max", &i.ground_extra_max);
  f("maintenance_min", &i.maintenance_min);
  f("maintenance_max", &i.maintenance_max);
  f("cost_rate_min", &i.cost_rate_min);
  f("cost_rate_max", &i.cost_rate_max);
  f("connection_cost_min", &i.connection_cost_min);
  f("connection_cost_max", &i.connection_cost_max);
  f("idle_cost_rate", &i.idle_cost_rate);
  f("idle_cost_cap", &i.idle_cost_cap);
  f("delay_kinks", &i.delay_kinks);
  f("delay_slopes", &i.delay_slopes);
  f("scenarios", &c.scenarios);
  DelayDistribution& d = c.distribution;
  f("dep_zero_prob", &d.dep_zero_prob);
  f("dep_mean", &d.dep_mean);
  f("arr_mean", &d.arr_mean);
  f("arr_shift", &d.arr_shift);
  f("arr_floor", &d.arr_floor);
  f("resolution", &d.resolution);
}

}  // namespace

Json config_to_json(const GenerateConfig& config) {
  GenerateConfig c = config;
  Json out{{"schema", kConfigSchema}};
  config_fields(c, [&](const char* name, auto* p) { out[name] = *p; });
  return out;
}

GenerateConfig config_from_json(const Json& json) {
  check_schema(json, kConfigSchema);
  GenerateConfig c;
  std::vector<std::string> known{"schema"};
  config_fields(c, [&](const char* name, auto* p) {
    known.push_back(name);
    auto it = json.find(name);
    if (it == json.end()) return;
    using T = std::remove_pointer_t<decltype(p)>;
    if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) fail(std::string("config.") + name + " must be an integer");
      *p = it->template get<int>();
    } else if constexpr (std::is_same_v<T, double>) {
      *p = get_number(*it, std::string("config.") + name);
    } else {
      if (!it->is_array()) fail(std::string("config.") + name + " must be an array");
      p->clear();
      for (const Json& x : *it) p->push_back(get_number(x, std::string("config.") + name));
    }
  });
  for (auto it = json.begin(); it != json.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      fail("config: unknown field '" + it.key() + "'");
  if (c.scenarios < 1) fail("config.scenarios must be at least 1");
  return c;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string instance_digest(const Instance& instance) { return fnv1a_hex(format_json(instance_to_json(instance))); }

}  // namespace tail
