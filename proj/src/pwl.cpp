#include "tail/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tail {
namespace {

bool same_slope(double a, double b) {
  return std::abs(a - b) <=
         kPwlTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

double slope_between(const Breakpoint& a, const Breakpoint& b) {
  return (b.y - a.y) / (b.x - a.x);
}

void normalize(std::vector<Breakpoint>& pts, double left, double right) {
  if (pts.empty()) throw std::invalid_argument("pwl: no breakpoints");
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("pwl: non-finite breakpoint");
  }
  if (!std::isfinite(left) || !std::isfinite(right))
    throw std::invalid_argument("pwl: non-finite boundary slope");
  std::stable_sort(pts.begin(), pts.end(),
                   [](const Breakpoint& a, const Breakpoint& b) { return a.x < b.x; });

  // Merge abscissae closer than the tolerance.
  std::vector<Breakpoint> merged;
  merged.reserve(pts.size());
  for (const auto& p : pts) {
    if (!merged.empty() && p.x - merged.back().x <= kPwlTolerance) {
      double scale = 1.0 + std::max(std::abs(p.y), std::abs(merged.back().y));
      if (std::abs(p.y - merged.back().y) > 1e-6 * scale)
        throw std::invalid_argument("pwl: discontinuous breakpoints");
      continue;
    }
    merged.push_back(p);
  }

  // Drop interior breakpoints with equal slopes on both sides.
  std::vector<Breakpoint> kept;
  kept.reserve(merged.size());
  for (const auto& p : merged) {
    while (kept.size() >= 2 &&
           same_slope(slope_between(kept[kept.size() - 2], kept.back()),
                      slope_between(kept.back(), p))) {
      kept.pop_back();
    }
    kept.push_back(p);
  }
  // Boundary points absorbed by the unbounded pieces.
  while (kept.size() >= 2 && same_slope(left, slope_between(kept[0], kept[1])))
    kept.erase(kept.begin());
  while (kept.size() >= 2 &&
         same_slope(right, slope_between(kept[kept.size() - 2], kept.back())))
    kept.pop_back();
  pts = std::move(kept);
}

std::vector<double> merged_abscissae(const PwlFunction& f, const PwlFunction& g) {
  std::vector<double> xs;
  xs.reserve(f.size() + g.size());
  for (const auto& p : f.breakpoints()) xs.push_back(p.x);
  for (const auto& p : g.breakpoints()) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (out.empty() || x - out.back() > kPwlTolerance) out.push_back(x);
  }
  return out;
}

double cross(const Breakpoint& o, const Breakpoint& a, const Breakpoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

PwlFunction::PwlFunction() : points_{{0.0, 0.0}} {}

PwlFunction::PwlFunction(std::vector<Breakpoint> breakpoints, double left_slope,
                         double right_slope)
    : points_(std::move(breakpoints)),
      left_slope_(left_slope),
      right_slope_(right_slope) {
  normalize(points_, left_slope_, right_slope_);
}

PwlFunction PwlFunction::constant(double value) {
  return PwlFunction({{0.0, value}}, 0.0, 0.0);
}

PwlFunction PwlFunction::affine(double slope, double intercept) {
  return PwlFunction({{0.0, intercept}}, slope, slope);
}

PwlFunction PwlFunction::delay_cost(std::span<const double> kinks,
                                    std::span<const double> slopes) {
  if (kinks.empty() || kinks.size() != slopes.size())
    throw std::invalid_argument("delay_cost: need one slope per kink");
  if (kinks.front() != 0.0)
    throw std::invalid_argument("delay_cost: first kink must be 0");
  std::vector<Breakpoint> pts;
  pts.reserve(kinks.size());
  double y = 0.0;
  pts.push_back({0.0, 0.0});
  for (std::size_t j = 1; j < kinks.size(); ++j) {
    if (!(kinks[j] > kinks[j - 1]))
      throw std::invalid_argument("delay_cost: kinks must increase");
    y += slopes[j - 1] * (kinks[j] - kinks[j - 1]);
    pts.push_back({kinks[j], y});
  }
  return PwlFunction(std::move(pts), 0.0, slopes.back());
}

double PwlFunction::evaluate(double x) const {
  const auto& first = points_.front();
  const auto& last = points_.back();
  if (x <= first.x) return first.y + left_slope_ * (x - first.x);
  if (x >= last.x) return last.y + right_slope_ * (x - last.x);
  auto it = std::upper_bound(points_.begin(), points_.end(), x,
                             [](double v, const Breakpoint& p) { return v < p.x; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.y + (x - a.x) * slope_between(a, b);
}

std::vector<double> PwlFunction::slopes() const {
  std::vector<double> out;
  out.reserve(points_.size() + 1);
  out.push_back(left_slope_);
  for (std::size_t i = 1; i < points_.size(); ++i)
    out.push_back(slope_between(points_[i - 1], points_[i]));
  out.push_back(right_slope_);
  return out;
}

bool PwlFunction::is_convex(double tol) const {
  auto s = slopes();
  for (std::size_t i = 1; i < s.size(); ++i) {
    double scale = std::max({1.0, std::abs(s[i]), std::abs(s[i - 1])});
    if (s[i] < s[i - 1] - tol * scale) return false;
  }
  return true;
}

bool PwlFunction::is_nondecreasing(double tol) const {
  for (double s : slopes()) {
    if (s < -tol) return false;
  }
  return true;
}

std::string PwlFunction::debug_string() const {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return std::string(buf);
  };
  std::string out = "slopes=[";
  auto s = slopes();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += fmt(s[i]);
  }
  out += "] breaks=[";
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i) out += ',';
    out += '(' + fmt(points_[i].x) + ',' + fmt(points_[i].y) + ')';
  }
  out += ']';
  return out;
}

PwlFunction add(const PwlFunction& f, const PwlFunction& g) {
  std::vector<Breakpoint> pts;
  for (double x : merged_abscissae(f, g)) pts.push_back({x, f(x) + g(x)});
  return PwlFunction(std::move(pts), f.left_slope() + g.left_slope(),
                     f.right_slope() + g.right_slope());
}

PwlFunction compose_affine(const PwlFunction& f, double shift) {
  std::vector<Breakpoint> pts(f.breakpoints().begin(), f.breakpoints().end());
  for (auto& p : pts) p.x -= shift;
  return PwlFunction(std::move(pts), f.left_slope(), f.right_slope());
}

PwlFunction compose_prop(const PwlFunction& f, double xi, double slack) {
  if (!f.is_nondecreasing())
    throw std::invalid_argument("compose_prop: function must be non-decreasing");
  if (std::isnan(slack) || slack == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("compose_prop: invalid slack");
  if (std::isinf(slack)) return PwlFunction::constant(f(xi));
  // Constant f(xi) up to the slack, then f translated so that slack maps to xi.
  std::vector<Breakpoint> pts{{slack, f(xi)}};
  for (const auto& p : f.breakpoints()) {
    if (p.x > xi + kPwlTolerance) pts.push_back({p.x - xi + slack, p.y});
  }
  return PwlFunction(std::move(pts), 0.0, f.right_slope());
}

PwlFunction pointwise_min(const PwlFunction& f, const PwlFunction& g) {
  std::vector<double> xs = merged_abscissae(f, g);
  std::vector<double> candidates = xs;
  auto diff = [&](double x) { return f(x) - g(x); };

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double d0 = diff(xs[i]);
    double d1 = diff(xs[i + 1]);
    if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0))
      candidates.push_back(xs[i] + (xs[i + 1] - xs[i]) * d0 / (d0 - d1));
  }
  // Crossings on the unbounded pieces.
  double dl = f.left_slope() - g.left_slope();
  if (dl != 0.0) {
    double x = xs.front() - diff(xs.front()) / dl;
    if (x < xs.front()) candidates.push_back(x);
  }
  double dr = f.right_slope() - g.right_slope();
  if (dr != 0.0) {
    double x = xs.back() - diff(xs.back()) / dr;
    if (x > xs.back()) candidates.push_back(x);
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<Breakpoint> pts;
  for (double x : candidates) {
    if (!pts.empty() && x - pts.back().x <= kPwlTolerance) continue;
    pts.push_back({x, std::min(f(x), g(x))});
  }

  // Whichever function is lower far out on each side gives the tail slope.
  double x0 = pts.front().x;
  double left;
  if (f.left_slope() != g.left_slope())
    left = std::max(f.left_slope(), g.left_slope());
  else
    left = f(x0) <= g(x0) ? f.left_slope() : g.left_slope();
  double xn = pts.back().x;
  double right;
  if (f.right_slope() != g.right_slope())
    right = std::min(f.right_slope(), g.right_slope());
  else
    right = f(xn) <= g(xn) ? f.right_slope() : g.right_slope();
  return PwlFunction(std::move(pts), left, right);
}

PwlFunction convex_meet(const PwlFunction& f, const PwlFunction& g) {
  if (!f.is_convex() || !g.is_convex())
    throw std::invalid_argument("convex_meet: inputs must be convex");
  const double left = std::max(f.left_slope(), g.left_slope());
  const double right = std::min(f.right_slope(), g.right_slope());
  if (left > right + kPwlTolerance * std::max({1.0, std::abs(left), std::abs(right)}))
    throw std::domain_error("convex_meet: envelope unbounded below");

  std::vector<Breakpoint> pts;
  pts.reserve(f.size() + g.size());
  pts.insert(pts.end(), f.breakpoints().begin(), f.breakpoints().end());
  pts.insert(pts.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(pts.begin(), pts.end(), [](const Breakpoint& a, const Breakpoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  // Among nearly equal abscissae only the lowest point can be on the hull.
  std::vector<Breakpoint> unique;
  for (const auto& p : pts) {
    if (!unique.empty() && p.x - unique.back().x <= kPwlTolerance) {
      unique.back().y = std::min(unique.back().y, p.y);
      continue;
    }
    unique.push_back(p);
  }

  // Lower hull, monotone chain.
  std::vector<Breakpoint> hull;
  for (const auto& p : unique) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }

  // Clip with the asymptotic slopes: keep the vertices between the support
  // points of the lines with slopes `left` and `right`.
  std::size_t lo = 0;
  while (lo + 1 < hull.size() && slope_between(hull[lo], hull[lo + 1]) < left) ++lo;
  std::size_t hi = hull.size() - 1;
  while (hi > lo && slope_between(hull[hi - 1], hull[hi]) > right) --hi;

  std::vector<Breakpoint> kept(hull.begin() + static_cast<std::ptrdiff_t>(lo),
                               hull.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return PwlFunction(std::move(kept), left, right);
}

}  // namespace tail
