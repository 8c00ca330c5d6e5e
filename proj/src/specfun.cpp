#include "outage/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace outage {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 100000;

// Series for P(a, x); converges quickly for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double upper_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Q(n, x) = e^{-x} sum_{k<n} x^k / k! for integer n.
double upper_poisson_sum(int n, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < n; ++k) {
    term *= x / k;
    sum += term;
  }
  return std::exp(-x) * sum;
}

bool small_integer(double a) { return a <= 64.0 && a == std::floor(a); }

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::domain_error("incomplete gamma requires a > 0 and x >= 0 (a=" + std::to_string(a) +
                            ", x=" + std::to_string(x) + ")");
  }
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("log_gamma requires a finite x > 0, got " + std::to_string(x));
  }
#if defined(__GLIBC__)
  // lgamma_r leaves the global signgam untouched, so concurrent callers do not race.
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double reg_lower_gamma(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::min(1.0, lower_series(a, x));
  const double q = small_integer(a) ? upper_poisson_sum(static_cast<int>(a), x) : upper_fraction(a, x);
  return std::max(0.0, 1.0 - q);
}

double reg_upper_gamma(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::max(0.0, 1.0 - lower_series(a, x));
  return small_integer(a) ? upper_poisson_sum(static_cast<int>(a), x) : upper_fraction(a, x);
}

double complex_multivariate_log_gamma(int m, int n) {
  if (m < 1 || n < m) {
    throw std::domain_error("complex multivariate gamma requires n >= m >= 1 (m=" + std::to_string(m) +
                            ", n=" + std::to_string(n) + ")");
  }
  double sum = 0.5 * m * (m - 1) * std::log(std::numbers::pi);
  for (int i = 1; i <= m; ++i) sum += log_gamma(static_cast<double>(n - i + 1));
  return sum;
}

}  // namespace outage
