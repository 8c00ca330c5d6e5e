#pragma once

namespace outage {

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x), the CDF of Gamma(shape a, scale 1).
///
/// Uses the power series below x = a + 1 and a Lentz continued fraction for the
/// complement above it. Integer shapes up to 64 take the finite Poisson sum for
/// the complement, which is exact up to rounding.
double reg_lower_gamma(double a, double x);

/// Complement Q(a, x) = 1 - P(a, x), computed without cancellation.
double reg_upper_gamma(double a, double x);

/// ln of the complex multivariate gamma function,
/// ln Gamma_m(n) = m(m-1)/2 ln(pi) + sum_{i=1..m} ln Gamma(n - i + 1).
/// Requires n >= m >= 1.
double complex_multivariate_log_gamma(int m, int n);

}  // namespace outage
