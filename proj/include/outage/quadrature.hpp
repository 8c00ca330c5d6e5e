#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace outage {

/// Tolerance contract for the adaptive integrators. Defaults are tight enough
/// that differences of outage probabilities survive at the 1e-6 level.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double err_bound = 0.0;
  long evaluations = 0;
};

/// Raised when an integrator exhausts its subdivision budget before meeting
/// the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& axis, double achieved, double requested);

  const std::string& axis() const noexcept { return axis_; }
  double achieved() const noexcept { return achieved_; }

 private:
  std::string axis_;
  double achieved_;
};

struct Rectangle {
  double x_lo, x_hi;
  double y_lo, y_hi;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208734629141, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo, hi;
  double value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

inline double checked(double v, double x) {
  if (!std::isfinite(v)) {
    throw std::domain_error("integrand is not finite at x=" + std::to_string(x));
  }
  return v;
}

template <typename F>
Segment kronrod21(F& f, double lo, double hi) {
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 10> left{};
  std::array<double, 10> right{};
  const double fc = checked(f(center), center);
  double resk = kKronrodWeights[10] * fc;
  double resg = 0.0;
  double resabs = std::abs(resk);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    left[j] = checked(f(center - dx), center - dx);
    right[j] = checked(f(center + dx), center + dx);
    const double pair = left[j] + right[j];
    resk += kKronrodWeights[j] * pair;
    resabs += kKronrodWeights[j] * (std::abs(left[j]) + std::abs(right[j]));
    if (j % 2 == 1) resg += kGaussWeights[j / 2] * pair;
  }
  const double reskh = 0.5 * resk;
  double resasc = kKronrodWeights[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kKronrodWeights[j] * (std::abs(left[j] - reskh) + std::abs(right[j] - reskh));
  }
  const double scale = std::abs(half);
  resk *= half;
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * epmach)) err = std::max(50.0 * epmach * resabs, err);
  return {lo, hi, resk, err};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G10/K21) integration of f over [lo, hi].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|). Running out of
/// subdivisions throws ConvergenceError; the partial result is never returned.
template <typename F>
  requires std::invocable<F&, double>
QuadratureResult integrate_1d(F&& f, double lo, double hi, const QuadratureSpec& spec = {},
                              const std::string& axis = "x") {
  spec.validate();
  if (!(lo <= hi)) throw std::invalid_argument("integrate_1d requires lo <= hi");
  if (lo == hi) return {0.0, 0.0, 0};

  std::priority_queue<detail::Segment> work;
  auto first = detail::kronrod21(f, lo, hi);
  long evaluations = 21;
  double value = first.value;
  double error = first.error;
  work.push(first);
  int segments = 1;

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(value)); };
  while (error > tolerance()) {
    if (segments >= spec.max_subdivisions) throw ConvergenceError(axis, error, tolerance());
    const detail::Segment worst = work.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) throw ConvergenceError(axis, error, tolerance());
    work.pop();
    const auto a = detail::kronrod21(f, worst.lo, mid);
    const auto b = detail::kronrod21(f, mid, worst.hi);
    evaluations += 42;
    value += a.value + b.value - worst.value;
    error += a.error + b.error - worst.error;
    work.push(a);
    work.push(b);
    ++segments;
  }

  // Re-sum to drop the drift accumulated by the running updates.
  value = 0.0;
  error = 0.0;
  while (!work.empty()) {
    value += work.top().value;
    error += work.top().error;
    work.pop();
  }
  return {value, error, evaluations};
}

/// Iterated integral of f(x, y) over a rectangle: the inner integral runs over
/// y for each outer node x. Half of the budget goes to each level; the reported
/// bound adds the outer estimate and the worst inner estimate times the x width.
template <typename F>
  requires std::invocable<F&, double, double>
QuadratureResult integrate_2d(F&& f, const Rectangle& region, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(region.x_lo <= region.x_hi) || !(region.y_lo <= region.y_hi)) {
    throw std::invalid_argument("integrate_2d requires an ordered rectangle");
  }
  const double width = region.x_hi - region.x_lo;
  QuadratureSpec inner = spec;
  inner.abs_tol = 0.5 * spec.abs_tol / std::max(width, 1.0);
  inner.rel_tol = 0.5 * spec.rel_tol;
  QuadratureSpec outer = spec;
  outer.abs_tol = 0.5 * spec.abs_tol;
  outer.rel_tol = 0.5 * spec.rel_tol;

  double worst_inner = 0.0;
  long evaluations = 0;
  auto slice = [&](double x) {
    QuadratureResult r;
    try {
      r = integrate_1d([&](double y) { return f(x, y); }, region.y_lo, region.y_hi, inner, "y (inner)");
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("y (inner) at x=" + std::to_string(x), e.achieved(), inner.abs_tol);
    }
    worst_inner = std::max(worst_inner, r.err_bound);
    evaluations += r.evaluations;
    return r.value;
  };
  auto result = integrate_1d(slice, region.x_lo, region.x_hi, outer, "x (outer)");
  result.err_bound += width * worst_inner;
  result.evaluations = evaluations;
  return result;
}

}  // namespace outage
