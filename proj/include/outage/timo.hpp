#pragma once

#include <vector>

#include "outage/channel.hpp"
#include "outage/quadrature.hpp"

namespace outage {

// Two-transmitter (t = 2) outage probability f(q1, q2) = Pr[1 + S + T + S T rho < e^R]
// with S ~ Gamma(r, q1), T ~ Gamma(r, q2), rho ~ Beta(r - 1, 1), all independent.
// For r = 1 the angle factor vanishes and rho = 0.

/// f(q1, q2) by quadrature. The inner T-integral is closed with the regularized
/// incomplete gamma, leaving a (rho, s) double integral; a zero entry reduces to
/// P(r, u / P).
OutageEstimate outage_timo(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad = {});

/// Interior partial derivative of f with respect to q2 (q1 held fixed).
double partial_df_dq2(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad = {});
/// Interior partial with respect to q1, via f(q1, q2) = f(q2, q1).
double partial_df_dq1(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad = {});

double partial_d2f_dq2dq2(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad = {});
double partial_d2f_dq1dq1(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad = {});
double partial_d2f_dq1dq2(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad = {});

struct BoundaryFirst {
  double at_q1_zero;  // df/dq2 at (0, P)
  double at_q2_zero;  // df/dq2 at (P, 0)
};

struct BoundarySecond {
  double d2q2_at_q1_zero;   // d2f/dq2^2 at (0, P)
  double d2q2_at_q2_zero;   // d2f/dq2^2 at (P, 0)
  double mixed_at_q1_zero;  // d2f/dq1dq2 at (0, P)
  double mixed_at_q2_zero;  // d2f/dq1dq2 at (P, 0); equal to mixed_at_q1_zero
};

/// Closed-form first partials on the boundary of the simplex.
BoundaryFirst boundary_partials_first(const ChannelSpec& spec);
/// Closed-form second partials on the boundary of the simplex.
BoundarySecond boundary_partials_second(const ChannelSpec& spec);

/// df/dq1 along q1 + q2 = P. Closed forms at q1 in {0, P}; exactly 0 at P/2.
double total_first_derivative(double q1, const ChannelSpec& spec, const QuadratureSpec& quad = {});
/// d2f/dq1^2 along q1 + q2 = P. Closed forms at q1 in {0, P}.
double total_second_derivative(double q1, const ChannelSpec& spec, const QuadratureSpec& quad = {});

struct DerivativeReport {
  double d1_at_zero;
  double d2_at_zero;
  double d1_at_half;
  double d2_at_half;
  BoundaryFirst boundary_first;
  BoundarySecond boundary_second;
  // Interior partials at (P/2, P/2).
  double dq2_at_half;
  double d2q2_at_half;
  double mixed_at_half;
};

DerivativeReport derivative_report(const ChannelSpec& spec, const QuadratureSpec& quad = {});

/// Sign decisions closer to zero than this are reported as inconclusive.
inline constexpr double kDefaultSignTolerance = 1e-6;

struct ConjectureVerdict {
  Verdict verdict;
  double d1_at_zero;
  double d2_at_zero;  // NaN when not needed (d1_at_zero decisively signed)
  double d1_at_half;  // 0 by symmetry, never computed numerically
  double d2_at_half;
  double tolerance;

  bool counterexample_found() const { return verdict == Verdict::counterexample; }
};

/// Derivative test for a non-conjectured minimizer: the endpoint must descend
/// (first order, or second order when the first vanishes) and the centre must be
/// a strict local maximum at second order.
ConjectureVerdict theorem1_check(const ChannelSpec& spec, const QuadratureSpec& quad = {},
                                 double tolerance = kDefaultSignTolerance);

struct MinSplit {
  double q_star;
  double f_star;
  double f_at_zero;
  double f_at_half;
  /// Largest quadrature error bound among the values compared.
  double err_bound;
  std::vector<double> grid_q;
  std::vector<double> grid_f;
};

/// Minimizes f(q1, P - q1) over q1 in [0, P/2]: uniform grid, then golden-section
/// refinement in the bracket around the best grid point down to width 1e-4 P.
MinSplit find_min_split(const ChannelSpec& spec, int grid_points, const QuadratureSpec& quad = {});

}  // namespace outage
