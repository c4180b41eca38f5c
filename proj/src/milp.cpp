#include "tail/milp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "tail/errors.hpp"
#include "tail/lp.hpp"

namespace tail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Fixed-format line: type in columns 2-3, names at 5 and 15, value at 25.
void line(std::ostream& out, const std::string& type, const std::string& a, const std::string& b,
          const std::string& value) {
  out << ' ' << pad(type, 2) << ' ' << pad(a, 8) << "  ";
  if (value.empty())
    out << b << '\n';
  else
    out << pad(b, 8) << "  " << value << '\n';
}

}  // namespace

int MilpModel::add_variable(std::string n, double lower, double upper, bool integer, double cost) {
  variables.push_back({std::move(n), lower, upper, integer, cost});
  return static_cast<int>(variables.size()) - 1;
}

int MilpModel::add_row(std::string n, char sense, double rhs) {
  rows.push_back({std::move(n), sense, rhs, {}, {}});
  return static_cast<int>(rows.size()) - 1;
}

void MilpModel::add_entry(int row, int var, double coef) {
  auto& r = rows[static_cast<std::size_t>(row)];
  r.vars.push_back(var);
  r.coefs.push_back(coef);
}

void MilpModel::normalize() {
  for (auto& r : rows) {
    std::map<int, double> acc;
    for (std::size_t i = 0; i < r.vars.size(); ++i) acc[r.vars[i]] += r.coefs[i];
    r.vars.clear();
    r.coefs.clear();
    for (auto [v, c] : acc)
      if (c != 0.0) {
        r.vars.push_back(v);
        r.coefs.push_back(c);
      }
  }
}

void write_mps(const MilpModel& model, std::ostream& out) {
  out << "NAME          " << model.name << '\n';
  out << "ROWS\n";
  out << " N  " << model.objective_name << '\n';
  for (const auto& r : model.rows) out << ' ' << r.sense << "  " << r.name << '\n';

  // Column-major view of the rows.
  std::vector<std::vector<std::pair<int, double>>> cols(model.variables.size());
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    const auto& r = model.rows[i];
    for (std::size_t e = 0; e < r.vars.size(); ++e)
      cols[static_cast<std::size_t>(r.vars[e])].push_back({static_cast<int>(i), r.coefs[e]});
  }
  for (auto& c : cols) std::stable_sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first < b.first; });

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const auto& v = model.variables[j];
    if (v.integer != in_int) {
      char name[16];
      std::snprintf(name, sizeof name, "M%07d", marker++);
      out << "    " << pad(name, 8) << "  'MARKER'                 " << (v.integer ? "'INTORG'" : "'INTEND'") << '\n';
      in_int = v.integer;
    }
    bool any = false;
    if (v.cost != 0.0) {
      line(out, "", v.name, model.objective_name, number(v.cost));
      any = true;
    }
    for (auto [row, coef] : cols[j]) {
      line(out, "", v.name, model.rows[static_cast<std::size_t>(row)].name, number(coef));
      any = true;
    }
    if (!any) line(out, "", v.name, model.objective_name, "0");
  }
  if (in_int) {
    char name[16];
    std::snprintf(name, sizeof name, "M%07d", marker++);
    out << "    " << pad(name, 8) << "  'MARKER'                 'INTEND'\n";
  }

  out << "RHS\n";
  if (model.objective_constant != 0.0) line(out, "", "RHS", model.objective_name, number(-model.objective_constant));
  for (const auto& r : model.rows)
    if (r.rhs != 0.0) line(out, "", "RHS", r.name, number(r.rhs));

  out << "BOUNDS\n";
  for (const auto& v : model.variables) {
    if (v.lower == -kInf && v.upper == kInf) {
      line(out, "FR", "BND", v.name, "");
      continue;
    }
    if (v.lower == -kInf)
      line(out, "MI", "BND", v.name, "");
    else if (v.lower != 0.0)
      line(out, "LO", "BND", v.name, number(v.lower));
    if (v.upper != kInf) line(out, "UP", "BND", v.name, number(v.upper));
  }
  out << "ENDATA\n";
}

MilpModel read_mps(std::istream& in) {
  MilpModel m;
  std::unordered_map<std::string, int> row_index, var_index;
  std::string section, text;
  bool integer = false;
  bool objective_seen = false;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw InputError("MPS line " + std::to_string(lineno) + ": " + what);
  };
  auto parse_number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) fail("bad number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + s + "'");
    }
    return 0.0;
  };
  auto var = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    int j = m.add_variable(name, 0.0, kInf, integer, 0.0);
    var_index.emplace(name, j);
    return j;
  };
  bool ended = false;
  while (std::getline(in, text)) {
    ++lineno;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text[0] == '*') continue;
    std::istringstream ss(text);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (text[0] != ' ' && text[0] != '\t') {
      section = tok[0];
      if (section == "NAME") m.name = tok.size() > 1 ? tok[1] : "";
      if (section == "ENDATA") {
        ended = true;
        break;
      }
      continue;
    }
    if (section == "ROWS") {
      if (tok.size() != 2) fail("expected sense and name");
      if (tok[0] == "N") {
        if (!objective_seen) {
          m.objective_name = tok[1];
          objective_seen = true;
        }
        continue;
      }
      if (tok[0] != "E" && tok[0] != "L" && tok[0] != "G") fail("unknown row sense " + tok[0]);
      if (row_index.count(tok[1])) fail("duplicate row " + tok[1]);
      row_index.emplace(tok[1], m.add_row(tok[1], tok[0][0], 0.0));
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && tok[1] == "'MARKER'") {
        if (tok[2] == "'INTORG'")
          integer = true;
        else if (tok[2] == "'INTEND'")
          integer = false;
        else
          fail("unknown marker");
        continue;
      }
      if (tok.size() != 3 && tok.size() != 5) fail("expected column entries");
      int j = var(tok[0]);
      for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
        double v = parse_number(tok[i + 1]);
        if (tok[i] == m.objective_name) {
          m.variables[static_cast<std::size_t>(j)].cost += v;
        } else {
          auto it = row_index.find(tok[i]);
          if (it == row_index.end()) fail("unknown row " + tok[i]);
          if (v != 0.0) m.add_entry(it->second, j, v);
        }
      }
    } else if (section == "RHS") {
      if (tok.size() != 3 && tok.size() != 5) fail("expected rhs entries");
      for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
        double v = parse_number(tok[i + 1]);
        if (tok[i] == m.objective_name) {
          m.objective_constant = -v;
        } else {
          auto it = row_index.find(tok[i]);
          if (it == row_index.end()) fail("unknown row " + tok[i]);
          m.rows[static_cast<std::size_t>(it->second)].rhs = v;
        }
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) fail("expected bound");
      auto it = var_index.find(tok[2]);
      if (it == var_index.end()) fail("unknown column " + tok[2]);
      auto& v = m.variables[static_cast<std::size_t>(it->second)];
      const std::string& type = tok[0];
      if (type == "FR") {
        v.lower = -kInf;
        v.upper = kInf;
      } else if (type == "MI") {
        v.lower = -kInf;
      } else if (type == "PL") {
        v.upper = kInf;
      } else if (type == "BV") {
        v.lower = 0.0;
        v.upper = 1.0;
        v.integer = true;
      } else {
        if (tok.size() != 4) fail("bound needs a value");
        double x = parse_number(tok[3]);
        if (type == "UP")
          v.upper = x;
        else if (type == "LO")
          v.lower = x;
        else if (type == "FX")
          v.lower = v.upper = x;
        else
          fail("unknown bound type " + type);
      }
    } else {
      fail("data outside a section");
    }
  }
  if (!ended) throw InputError("MPS: missing ENDATA");
  m.normalize();
  return m;
}

namespace {

struct Bounds {
  std::vector<double> lower, upper;
};

// Solves the LP relaxation under `b` by mapping to x >= 0 equality form.
LpSolution solve_relaxation(const MilpModel& m, const Bounds& b, std::vector<double>& x, double& objective) {
  const std::size_t n = m.variables.size();
  // x_j = offset_j + sign_j * p_j (- q_j when free).
  std::vector<double> offset(n, 0.0), sign(n, 1.0);
  std::vector<int> p(n, -1), q(n, -1);
  LpModel lp;
  std::vector<double> rhs(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) rhs[i] = m.rows[i].rhs;
  int next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double l = b.lower[j], u = b.upper[j];
    if (l > -kInf) {
      offset[j] = l;
    } else if (u < kInf) {
      offset[j] = u;
      sign[j] = -1.0;
    } else {
      q[j] = -2;  // marks free
    }
    p[j] = next++;
    if (q[j] == -2) q[j] = next++;
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    lp.add_row(0.0);
    const auto& r = m.rows[i];
    for (std::size_t e = 0; e < r.vars.size(); ++e) rhs[i] -= r.coefs[e] * offset[static_cast<std::size_t>(r.vars[e])];
  }
  // Column-wise entries.
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    for (std::size_t e = 0; e < m.rows[i].vars.size(); ++e)
      cols[static_cast<std::size_t>(m.rows[i].vars[e])].push_back({static_cast<int>(i), m.rows[i].coefs[e]});
  double constant = m.objective_constant;
  std::vector<int> rows;
  std::vector<double> vals;
  std::vector<int> bound_row(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    constant += m.variables[j].cost * offset[j];
    rows.clear();
    vals.clear();
    for (auto [i, c] : cols[j]) {
      rows.push_back(i);
      vals.push_back(sign[j] * c);
    }
    if (q[j] < 0 && b.lower[j] > -kInf && b.upper[j] < kInf) {
      bound_row[j] = lp.add_row(0.0);
      rows.push_back(bound_row[j]);
      vals.push_back(1.0);
    }
    lp.add_column(sign[j] * m.variables[j].cost, rows, vals);
    if (q[j] >= 0) {
      for (auto& v : vals) v = -v;
      lp.add_column(-m.variables[j].cost, rows, vals);
    }
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    lp.rhs()[i] = rhs[i];
    char s = m.rows[i].sense;
    if (s != 'E') {
      const int r[] = {static_cast<int>(i)};
      const double v[] = {s == 'L' ? 1.0 : -1.0};
      lp.add_column(0.0, r, v);
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if (bound_row[j] >= 0) {
      lp.rhs()[static_cast<std::size_t>(bound_row[j])] = b.upper[j] - b.lower[j];
      const int r[] = {bound_row[j]};
      const double v[] = {1.0};
      lp.add_column(0.0, r, v);
    }
  auto sol = solve_lp(lp);
  if (sol.status == LpStatus::optimal) {
    x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = offset[j] + sign[j] * sol.x[static_cast<std::size_t>(p[j])];
      if (q[j] >= 0) x[j] -= sol.x[static_cast<std::size_t>(q[j])];
    }
    objective = sol.objective + constant;
  }
  return sol;
}

}  // namespace

MilpResult solve_milp(const MilpModel& model, long node_limit) {
  MilpResult result;
  Bounds root{{}, {}};
  for (const auto& v : model.variables) {
    root.lower.push_back(v.integer && v.lower > -kInf ? std::ceil(v.lower - 1e-9) : v.lower);
    root.upper.push_back(v.integer && v.upper < kInf ? std::floor(v.upper + 1e-9) : v.upper);
  }
  double incumbent = kInf;
  std::vector<Bounds> stack{root};
  bool unbounded = false;
  while (!stack.empty()) {
    if (result.nodes >= node_limit) {
      result.status = MilpStatus::node_limit;
      return result;
    }
    Bounds b = std::move(stack.back());
    stack.pop_back();
    ++result.nodes;
    bool empty = false;
    for (std::size_t j = 0; j < b.lower.size(); ++j) empty = empty || b.lower[j] > b.upper[j];
    if (empty) continue;
    std::vector<double> x;
    double obj = 0.0;
    auto sol = solve_relaxation(model, b, x, obj);
    if (sol.status == LpStatus::unbounded) {
      unbounded = true;
      continue;
    }
    if (sol.status != LpStatus::optimal) continue;
    if (obj >= incumbent - 1e-9 * (1.0 + std::abs(incumbent))) continue;
    int branch = -1;
    double score = 1e-6;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!model.variables[j].integer) continue;
      double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > score) {
        score = frac;
        branch = static_cast<int>(j);
      }
    }
    if (branch < 0) {
      incumbent = obj;
      result.objective = obj;
      result.x = x;
      for (std::size_t j = 0; j < x.size(); ++j)
        if (model.variables[j].integer) result.x[j] = std::round(x[j]);
      continue;
    }
    double v = x[static_cast<std::size_t>(branch)];
    Bounds down = b, up = std::move(b);
    down.upper[static_cast<std::size_t>(branch)] = std::floor(v);
    up.lower[static_cast<std::size_t>(branch)] = std::ceil(v);
    if (v - std::floor(v) < 0.5) {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));
    } else {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    }
  }
  if (incumbent < kInf)
    result.status = MilpStatus::optimal;
  else
    result.status = unbounded ? MilpStatus::unbounded : MilpStatus::infeasible;
  return result;
}

}  // namespace tail
