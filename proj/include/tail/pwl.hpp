#pragma once

#include <span>
#include <string>
#include <vector>

namespace tail {

/// Absolute tolerance on abscissae; relative (scaled by 1 + |y|) on values.
inline constexpr double kPwlTolerance = 1e-9;

struct Breakpoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Breakpoint&) const = default;
};

/// A continuous piecewise linear function on the whole real line.
///
/// Stored as a strictly increasing list of breakpoints plus the slopes of the
/// two unbounded pieces. Between breakpoints the function interpolates
/// linearly, so continuity holds by construction. There is always at least one
/// breakpoint; an affine function carries a single anchor point.
///
/// Construction normalizes the input: breakpoints closer than kPwlTolerance are
/// merged and interior breakpoints whose adjacent slopes agree within
/// kPwlTolerance are dropped.
class PwlFunction {
 public:
  /// The zero function.
  PwlFunction();
  PwlFunction(std::vector<Breakpoint> breakpoints, double left_slope,
              double right_slope);

  static PwlFunction constant(double value);
  static PwlFunction affine(double slope, double intercept);

  /// Delay-cost shape: zero for x <= 0, then slopes[j] on [kinks[j], kinks[j+1]).
  /// `kinks` must start at 0 and increase; slopes.size() == kinks.size().
  static PwlFunction delay_cost(std::span<const double> kinks,
                                std::span<const double> slopes);

  double operator()(double x) const { return evaluate(x); }
  double evaluate(double x) const;

  std::span<const Breakpoint> breakpoints() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }

  /// Left slope, slopes of each bounded segment, right slope.
  std::vector<double> slopes() const;

  bool is_convex(double tol = kPwlTolerance) const;
  bool is_nondecreasing(double tol = kPwlTolerance) const;

  /// `slopes=[...] breaks=[(x,y),...]`, values printed with %.12g.
  std::string debug_string() const;

  bool operator==(const PwlFunction&) const = default;

 private:
  std::vector<Breakpoint> points_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
};

/// x -> f(x) + g(x).
PwlFunction add(const PwlFunction& f, const PwlFunction& g);

/// x -> f(x + shift).
PwlFunction compose_affine(const PwlFunction& f, double shift);

/// x -> f(xi + max(x - slack, 0)). `slack` may be +infinity, giving the
/// constant f(xi). Throws std::invalid_argument if f has a negative slope.
PwlFunction compose_prop(const PwlFunction& f, double xi, double slack);

/// Exact pointwise minimum; crossings become breakpoints.
PwlFunction pointwise_min(const PwlFunction& f, const PwlFunction& g);

/// Largest convex function below both f and g (lower convex envelope of
/// min(f, g)). Throws std::invalid_argument on non-convex input and
/// std::domain_error when the envelope is unbounded below, i.e. when
/// max(left slopes) > min(right slopes).
PwlFunction convex_meet(const PwlFunction& f, const PwlFunction& g);

}  // namespace tail
