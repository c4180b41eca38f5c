#pragma once

// Test-only helpers: random piecewise linear functions and naive oracles that
// do not share code paths with src/pwl.cpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tail/pwl.hpp"

namespace tail::testing {

inline bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline std::vector<double> random_abscissae(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < n) {
    double x = std::round(u(rng) * 100.0) / 100.0;
    bool fresh = std::none_of(xs.begin(), xs.end(),
                              [&](double y) { return std::abs(x - y) < 0.05; });
    if (fresh) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

inline PwlFunction random_pwl(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> v(-50.0, 50.0);
  std::uniform_real_distribution<double> s(-3.0, 3.0);
  auto xs = random_abscissae(rng, count(rng));
  std::vector<Breakpoint> pts;
  for (double x : xs) pts.push_back({x, v(rng)});
  return PwlFunction(std::move(pts), s(rng), s(rng));
}

/// Builds a function from a slope sequence (left, interior..., right) anchored
/// at (xs[0], y0).
inline PwlFunction from_slopes(const std::vector<double>& xs,
                               const std::vector<double>& slopes, double y0) {
  std::vector<Breakpoint> pts{{xs[0], y0}};
  for (std::size_t i = 1; i < xs.size(); ++i)
    pts.push_back({xs[i], pts.back().y + slopes[i] * (xs[i] - xs[i - 1])});
  return PwlFunction(std::move(pts), slopes.front(), slopes.back());
}

/// Convex; left slope in [-2, 0.5] and right slope in [0.5, 3], so the convex
/// meet of any two such functions is bounded below.
inline PwlFunction random_convex(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> left(-2.0, 0.5);
  std::uniform_real_distribution<double> right(0.5, 3.0);
  std::uniform_real_distribution<double> y0(-30.0, 30.0);
  auto xs = random_abscissae(rng, count(rng));
  double lo = left(rng);
  double hi = right(rng);
  std::uniform_real_distribution<double> mid(lo, hi);
  std::vector<double> slopes{lo};
  std::vector<double> inner;
  for (std::size_t i = 1; i < xs.size(); ++i) inner.push_back(mid(rng));
  std::sort(inner.begin(), inner.end());
  slopes.insert(slopes.end(), inner.begin(), inner.end());
  slopes.push_back(hi);
  return from_slopes(xs, slopes, y0(rng));
}

/// Convex and non-decreasing: slopes in [0, 4].
inline PwlFunction random_convex_nondecreasing(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> s(0.0, 4.0);
  std::uniform_real_distribution<double> y0(-10.0, 30.0);
  auto xs = random_abscissae(rng, count(rng));
  std::vector<double> slopes;
  for (std::size_t i = 0; i <= xs.size(); ++i) slopes.push_back(s(rng));
  std::sort(slopes.begin(), slopes.end());
  return from_slopes(xs, slopes, y0(rng));
}

/// Naive evaluation by scanning for the enclosing segment.
inline double naive_eval(const PwlFunction& f, double x) {
  auto pts = f.breakpoints();
  if (x <= pts.front().x) return pts.front().y + f.left_slope() * (x - pts.front().x);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (x <= pts[i].x) {
      double t = (x - pts[i - 1].x) / (pts[i].x - pts[i - 1].x);
      return (1.0 - t) * pts[i - 1].y + t * pts[i].y;
    }
  }
  return pts.back().y + f.right_slope() * (x - pts.back().x);
}

/// Value at x of the largest convex function below both f and g, computed as
/// the best affine minorant: an affine a*x+b lies below a convex PWL function
/// iff a is within its boundary slopes and it lies below every breakpoint.
inline double envelope_oracle(const PwlFunction& f, const PwlFunction& g, double x) {
  double lo = std::max(f.left_slope(), g.left_slope());
  double hi = std::min(f.right_slope(), g.right_slope());
  std::vector<Breakpoint> pts(f.breakpoints().begin(), f.breakpoints().end());
  pts.insert(pts.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::vector<double> candidates{lo, hi};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].x == pts[j].x) continue;
      double a = (pts[j].y - pts[i].y) / (pts[j].x - pts[i].x);
      if (a > lo && a < hi) candidates.push_back(a);
    }
  double best = -std::numeric_limits<double>::infinity();
  for (double a : candidates) {
    double b = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) b = std::min(b, p.y - a * p.x);
    best = std::max(best, a * x + b);
  }
  return best;
}

}  // namespace tail::testing
