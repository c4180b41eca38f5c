#include "tail/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tail {

int LpModel::add_column(double cost, std::span<const int> rows, std::span<const double> values) {
  if (rows.size() != values.size()) throw std::invalid_argument("column rows and values differ");
  std::vector<std::pair<int, double>> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= this->rows()) throw std::out_of_range("column row out of range");
    entries.emplace_back(rows[i], values[i]);
  }
  std::sort(entries.begin(), entries.end());
  std::vector<int> r;
  std::vector<double> v;
  for (const auto& [row, val] : entries) {
    if (!r.empty() && r.back() == row)
      v.back() += val;
    else {
      r.push_back(row);
      v.push_back(val);
    }
  }
  cost_.push_back(cost);
  col_rows_.push_back(std::move(r));
  col_vals_.push_back(std::move(v));
  return columns() - 1;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;

class Simplex {
 public:
  Simplex(const LpModel& model, const LpOptions& options)
      : model_(model),
        opt_(options),
        m_(model.rows()),
        n_(model.columns()),
        sign_(static_cast<std::size_t>(m_), 1.0),
        b_(model.rhs()) {
    for (int i = 0; i < m_; ++i)
      if (b_[static_cast<std::size_t>(i)] < 0) {
        sign_[static_cast<std::size_t>(i)] = -1.0;
        b_[static_cast<std::size_t>(i)] = -b_[static_cast<std::size_t>(i)];
      }
    b_scale_ = 1.0;
    for (double v : b_) b_scale_ = std::max(b_scale_, std::abs(v));
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations : 50 * (m_ + n_) + 1000;
    cost_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    is_basic_.assign(static_cast<std::size_t>(n_ + m_), 0);
  }

  LpSolution solve(std::span<const int> warm) {
    LpSolution out;
    bool warm_ok = !warm.empty() && try_warm(warm);
    if (!warm_ok) {
      cold_basis();
      for (int j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = 0.0;
      for (int r = 0; r < m_; ++r) cost_[static_cast<std::size_t>(n_ + r)] = 1.0;
      LpStatus st = run(false);
      if (st == LpStatus::iteration_limit) return finish(out, st);
      double infeas = 0.0;
      for (int r = 0; r < m_; ++r)
        if (is_artificial(basis_[static_cast<std::size_t>(r)])) infeas += std::max(xb_[static_cast<std::size_t>(r)], 0.0);
      if (infeas > 1e-7 * b_scale_) return finish(out, LpStatus::infeasible);
      drive_out_artificials();
    }
    for (int j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = model_.cost(j);
    for (int r = 0; r < m_; ++r) cost_[static_cast<std::size_t>(n_ + r)] = 0.0;
    return finish(out, run(true));
  }

 private:
  bool is_artificial(int var) const { return var >= n_; }

  /// Column of var in the sign-normalized system, applied to a dense vector.
  template <class F>
  void for_column(int var, F&& f) const {
    if (var >= n_) {
      f(var - n_, 1.0);
      return;
    }
    auto rows = model_.column_rows(var);
    auto vals = model_.column_values(var);
    for (std::size_t i = 0; i < rows.size(); ++i)
      f(rows[i], vals[i] * sign_[static_cast<std::size_t>(rows[i])]);
  }

  void cold_basis() {
    basis_.resize(static_cast<std::size_t>(m_));
    std::fill(is_basic_.begin(), is_basic_.end(), 0);
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      basis_[static_cast<std::size_t>(r)] = n_ + r;
      is_basic_[static_cast<std::size_t>(n_ + r)] = 1;
      binv_[idx(r, r)] = 1.0;
    }
    xb_ = b_;
  }

  bool try_warm(std::span<const int> warm) {
    if (static_cast<int>(warm.size()) != m_) return false;
    basis_.assign(static_cast<std::size_t>(m_), 0);
    std::fill(is_basic_.begin(), is_basic_.end(), 0);
    for (int r = 0; r < m_; ++r) {
      int v = warm[static_cast<std::size_t>(r)];
      int var = v >= 0 ? v : n_ + (-1 - v);
      if (var < 0 || var >= n_ + m_ || is_basic_[static_cast<std::size_t>(var)]) return false;
      basis_[static_cast<std::size_t>(r)] = var;
      is_basic_[static_cast<std::size_t>(var)] = 1;
    }
    if (!refactor()) return false;
    for (int r = 0; r < m_; ++r) {
      double x = xb_[static_cast<std::size_t>(r)];
      if (x < -1e-9 * b_scale_) return false;
      if (is_artificial(basis_[static_cast<std::size_t>(r)]) && x > 1e-9 * b_scale_) return false;
    }
    return true;
  }

  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(c);
  }

  /// Recomputes the basis inverse and basic values. False if singular.
  bool refactor() {
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> a(mm * mm, 0.0);
    for (int r = 0; r < m_; ++r)
      for_column(basis_[static_cast<std::size_t>(r)], [&](int row, double v) { a[idx(row, r)] = v; });
    binv_.assign(mm * mm, 0.0);
    for (int r = 0; r < m_; ++r) binv_[idx(r, r)] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int p = c;
      for (int r = c + 1; r < m_; ++r)
        if (std::abs(a[idx(r, c)]) > std::abs(a[idx(p, c)])) p = r;
      if (std::abs(a[idx(p, c)]) < 1e-11) return false;
      if (p != c)
        for (int k = 0; k < m_; ++k) {
          std::swap(a[idx(p, k)], a[idx(c, k)]);
          std::swap(binv_[idx(p, k)], binv_[idx(c, k)]);
        }
      double inv = 1.0 / a[idx(c, c)];
      for (int k = 0; k < m_; ++k) {
        a[idx(c, k)] *= inv;
        binv_[idx(c, k)] *= inv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = a[idx(r, c)];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          a[idx(r, k)] -= f * a[idx(c, k)];
          binv_[idx(r, k)] -= f * binv_[idx(c, k)];
        }
      }
    }
    xb_.assign(mm, 0.0);
    for (int r = 0; r < m_; ++r) {
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += binv_[idx(r, k)] * b_[static_cast<std::size_t>(k)];
      if (s < 0 && s > -1e-11 * b_scale_) s = 0.0;
      xb_[static_cast<std::size_t>(r)] = s;
    }
    return true;
  }

  void duals(std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      double cb = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      if (cb == 0.0) continue;
      for (int i = 0; i < m_; ++i) y[static_cast<std::size_t>(i)] += cb * binv_[idx(r, i)];
    }
  }

  void ftran(int var, std::vector<double>& w) const {
    w.assign(static_cast<std::size_t>(m_), 0.0);
    for_column(var, [&](int row, double v) {
      for (int r = 0; r < m_; ++r) w[static_cast<std::size_t>(r)] += binv_[idx(r, row)] * v;
    });
  }

  void pivot(int r, int var, const std::vector<double>& w, double theta) {
    for (int i = 0; i < m_; ++i)
      if (i != r) xb_[static_cast<std::size_t>(i)] -= theta * w[static_cast<std::size_t>(i)];
    xb_[static_cast<std::size_t>(r)] = theta;
    double inv = 1.0 / w[static_cast<std::size_t>(r)];
    for (int k = 0; k < m_; ++k) binv_[idx(r, k)] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = w[static_cast<std::size_t>(i)];
      if (f == 0.0) continue;
      for (int k = 0; k < m_; ++k) binv_[idx(i, k)] -= f * binv_[idx(r, k)];
    }
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    basis_[static_cast<std::size_t>(r)] = var;
    is_basic_[static_cast<std::size_t>(var)] = 1;
    ++iterations_;
  }

  LpStatus run(bool phase_two) {
    const long degenerate_limit = opt_.degenerate_limit >= 0 ? opt_.degenerate_limit : 10L * (m_ + n_);
    long degenerate = 0;
    int since_refactor = 0;
    std::vector<double> y, w;
    while (true) {
      if (iterations_ >= max_iter_) return LpStatus::iteration_limit;
      duals(y);
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        double c = cost_[static_cast<std::size_t>(j)];
        double d = c, mass = 0.0;
        for_column(j, [&](int row, double v) {
          double t = y[static_cast<std::size_t>(row)] * v;
          d -= t;
          mass += std::abs(t);
        });
        // Cancellation in c - y'a loses about eps * sum |y_i a_ij|.
        if (d >= -(opt_.tolerance * (1.0 + std::abs(c)) + 1e-14 * mass)) continue;
        if (bland_) {
          enter = j;
          break;
        }
        if (d < best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) {
        if (since_refactor > 0) {
          if (!refactor()) throw std::runtime_error("basis became singular");
          since_refactor = 0;
          continue;
        }
        return LpStatus::optimal;
      }
      ftran(enter, w);
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        double wr = w[static_cast<std::size_t>(r)];
        double ratio;
        if (phase_two && is_artificial(basis_[static_cast<std::size_t>(r)]) && std::abs(wr) > kPivotTol)
          ratio = 0.0;
        else if (wr > kPivotTol)
          ratio = std::max(xb_[static_cast<std::size_t>(r)], 0.0) / wr;
        else
          continue;
        theta = std::min(theta, ratio);
      }
      if (!std::isfinite(theta)) return LpStatus::unbounded;
      double band = theta + 1e-12 * (1.0 + theta);
      for (int r = 0; r < m_; ++r) {
        double wr = w[static_cast<std::size_t>(r)];
        double ratio;
        if (phase_two && is_artificial(basis_[static_cast<std::size_t>(r)]) && std::abs(wr) > kPivotTol)
          ratio = 0.0;
        else if (wr > kPivotTol)
          ratio = std::max(xb_[static_cast<std::size_t>(r)], 0.0) / wr;
        else
          continue;
        if (ratio > band) continue;
        if (leave < 0) {
          leave = r;
          continue;
        }
        if (bland_) {
          if (basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]) leave = r;
        } else if (std::abs(wr) > std::abs(w[static_cast<std::size_t>(leave)])) {
          leave = r;
        }
      }
      double step = std::max(xb_[static_cast<std::size_t>(leave)], 0.0) / w[static_cast<std::size_t>(leave)];
      if (phase_two && is_artificial(basis_[static_cast<std::size_t>(leave)])) step = 0.0;
      if (step < 0) step = 0.0;
      pivot(leave, enter, w, step);
      if (step <= 1e-12) {
        if (++degenerate > degenerate_limit) bland_ = used_bland_ = true;
      } else {
        degenerate = 0;
        bland_ = false;
      }
      if (++since_refactor >= opt_.refactor_every) {
        if (!refactor()) throw std::runtime_error("basis became singular");
        since_refactor = 0;
      }
    }
  }

  void drive_out_artificials() {
    std::vector<double> w;
    for (int r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[static_cast<std::size_t>(r)])) continue;
      for (int j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        double v = 0.0;
        for_column(j, [&](int row, double a) { v += binv_[idx(r, row)] * a; });
        if (std::abs(v) < 1e-7) continue;
        ftran(j, w);
        pivot(r, j, w, 0.0);
        break;
      }
    }
    refactor();
  }

  LpSolution& finish(LpSolution& out, LpStatus status) {
    out.status = status;
    out.iterations = iterations_;
    out.used_bland = used_bland_;
    out.x.assign(static_cast<std::size_t>(n_), 0.0);
    out.basis.resize(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) {
      int var = basis_[static_cast<std::size_t>(r)];
      out.basis[static_cast<std::size_t>(r)] = var < n_ ? var : -1 - (var - n_);
      if (var < n_) out.x[static_cast<std::size_t>(var)] = std::max(xb_[static_cast<std::size_t>(r)], 0.0);
    }
    out.objective = 0.0;
    for (int j = 0; j < n_; ++j) out.objective += model_.cost(j) * out.x[static_cast<std::size_t>(j)];
    std::vector<double> y;
    duals(y);
    out.duals.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i)
      out.duals[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] * sign_[static_cast<std::size_t>(i)];
    return out;
  }

  const LpModel& model_;
  LpOptions opt_;
  int m_, n_;
  std::vector<double> sign_, b_;
  double b_scale_ = 1.0;
  int max_iter_ = 0;
  std::vector<double> cost_;
  std::vector<char> is_basic_;
  std::vector<int> basis_;
  std::vector<double> binv_, xb_;
  int iterations_ = 0;
  bool bland_ = false, used_bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LpModel& model, const LpOptions& options, std::span<const int> warm_basis) {
  Simplex s(model, options);
  return s.solve(warm_basis);
}

}  // namespace tail
