#include "outage/timo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "outage/specfun.hpp"

namespace outage {

namespace {

void require_timo(const ChannelSpec& spec) {
  spec.validate();
  if (spec.t != 2) throw std::invalid_argument("two-transmitter routines require t = 2");
}

void require_interior(PowerSplit split) {
  if (!(split.q1 > 0.0) || !(split.q2 > 0.0)) {
    throw std::domain_error("interior partial derivatives need q1, q2 > 0; use the boundary closed forms");
  }
}

// Beyond s = q1 * cutoff the Gamma(r, q1) weight carries less than 1e-22 of its mass.
double gamma_tail_cutoff(int r) {
  double c = r + 10.0;
  while (reg_upper_gamma(r, c) > 1e-22) c += 5.0;
  return c;
}

// Shared pieces of every integrand: Gamma(r, q1) log-density in s and the
// inner upper limit w(s, rho) = (u - s) / (1 + rho s) of the T-integral.
struct Integrand {
  int r;
  double u;
  double q1;
  double q2;
  double log_fact;  // ln (r-1)!

  Integrand(PowerSplit split, const ChannelSpec& spec)
      : r(spec.r), u(spec.u()), q1(split.q1), q2(split.q2), log_fact(log_gamma(spec.r)) {}

  double log_density_s(double s) const { return (r - 1) * std::log(s) - s / q1 - log_fact - r * std::log(q1); }
  double w(double s, double rho) const { return std::max(0.0, (u - s) / (1.0 + rho * s)); }
  double s_upper() const { return std::min(u, q1 * gamma_tail_cutoff(r)); }
};

// Integrates g(rho, s) against the rho-weight (r-1) rho^{r-2} on [0,1] and over
// s in [0, s_hi]; r = 1 collapses to rho = 0.
template <typename G>
QuadratureResult integrate_rho_s(int r, double s_hi, G&& g, const QuadratureSpec& quad) {
  if (r == 1) return integrate_1d([&](double s) { return g(0.0, s); }, 0.0, s_hi, quad, "s");
  const double rho_exp = r - 2;
  auto weighted = [&](double rho, double s) {
    const double weight = (r - 1) * (rho_exp == 0.0 ? 1.0 : std::pow(rho, rho_exp));
    return weight == 0.0 ? 0.0 : weight * g(rho, s);
  };
  return integrate_2d(weighted, Rectangle{0.0, 1.0, 0.0, s_hi}, quad);
}

double gamma_density(int r, double scale, double x) {
  return std::exp((r - 1) * std::log(x) - x / scale - log_gamma(r) - r * std::log(scale));
}

// Golden-section search for a unimodal bracket; returns the best point seen.
template <typename F>
std::pair<double, double> golden_section(F&& f, double a, double b, double width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > width) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

OutageEstimate outage_timo(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  split.validate(spec);
  quad.validate();
  OutageEstimate est;
  est.method = Method::quadrature;
  if (!split.interior()) {
    est.value = reg_lower_gamma(spec.r, spec.u() / spec.power);
    return est;
  }
  const Integrand in(split, spec);
  auto g = [&](double rho, double s) {
    return std::exp(in.log_density_s(s)) * reg_lower_gamma(in.r, in.w(s, rho) / in.q2);
  };
  const auto res = integrate_rho_s(in.r, in.s_upper(), g, quad);
  est.value = std::clamp(res.value, 0.0, 1.0);
  est.uncertainty = res.err_bound;
  return est;
}

double partial_df_dq2(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  require_interior(split);
  const Integrand in(split, spec);
  auto g = [&](double rho, double s) {
    const double w = in.w(s, rho);
    if (w == 0.0) return 0.0;
    return -std::exp(in.log_density_s(s) + in.r * std::log(w) - w / in.q2 - in.log_fact -
                     (in.r + 1) * std::log(in.q2));
  };
  return integrate_rho_s(in.r, in.s_upper(), g, quad).value;
}

double partial_df_dq1(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad) {
  return partial_df_dq2(split.swapped(), spec, quad);
}

double partial_d2f_dq2dq2(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  require_interior(split);
  const Integrand in(split, spec);
  auto g = [&](double rho, double s) {
    const double w = in.w(s, rho);
    if (w == 0.0) return 0.0;
    const double x = w / in.q2;
    return std::exp(in.log_density_s(s) + in.r * std::log(w) - x - in.log_fact - (in.r + 2) * std::log(in.q2)) *
           (in.r + 1 - x);
  };
  return integrate_rho_s(in.r, in.s_upper(), g, quad).value;
}

double partial_d2f_dq1dq1(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad) {
  return partial_d2f_dq2dq2(split.swapped(), spec, quad);
}

double partial_d2f_dq1dq2(PowerSplit split, const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  require_interior(split);
  const Integrand in(split, spec);
  auto g = [&](double rho, double s) {
    const double w = in.w(s, rho);
    if (w == 0.0) return 0.0;
    return std::exp(in.log_density_s(s) - std::log(in.q1) + in.r * std::log(w) - w / in.q2 - in.log_fact -
                    (in.r + 1) * std::log(in.q2)) *
           (in.r - s / in.q1);
  };
  return integrate_rho_s(in.r, in.s_upper(), g, quad).value;
}

BoundaryFirst boundary_partials_first(const ChannelSpec& spec) {
  require_timo(spec);
  const int r = spec.r;
  const double u = spec.u();
  const double P = spec.power;
  const double g = gamma_density(r, P, u);
  return {-g * u / P, -g * (r + (r - 1) * u)};
}

BoundarySecond boundary_partials_second(const ChannelSpec& spec) {
  require_timo(spec);
  const int r = spec.r;
  const double u = spec.u();
  const double P = spec.power;
  const double g = gamma_density(r, P, u);
  const double prefactor = g * u / P;  // u^r e^{-u/P} / ((r-1)! P^{r+1})

  BoundarySecond out{};
  out.d2q2_at_q1_zero = prefactor / P * (r + 1 - u / P);
  const double bracket = P * (r - 1) * (1.0 / u + 1.0) * (1.0 / u + 1.0) - 1.0 / u - 2.0 * (r - 1) / r -
                         u * (r - 1) / (r + 1.0);
  out.d2q2_at_q2_zero = prefactor * r * (r + 1) * bracket;
  out.mixed_at_q1_zero = prefactor / P * (r * P / u - 1.0) * (r + (r - 1) * u);
  out.mixed_at_q2_zero = out.mixed_at_q1_zero;
  return out;
}

double total_first_derivative(double q1, const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  const double P = spec.power;
  if (!(q1 >= 0.0) || !(q1 <= P)) throw std::invalid_argument("q1 must lie in [0, P]");
  if (q1 == 0.0 || q1 == P) {
    const auto b = boundary_partials_first(spec);
    // d/dq1 f(0, P) = df/dq1(0,P) - df/dq2(0,P), and df/dq1(0,P) = df/dq2(P,0).
    const double at_zero = b.at_q2_zero - b.at_q1_zero;
    return q1 == 0.0 ? at_zero : -at_zero;
  }
  if (q1 == 0.5 * P) return 0.0;
  const PowerSplit split = PowerSplit::along(q1, spec);
  return partial_df_dq1(split, spec, quad) - partial_df_dq2(split, spec, quad);
}

double total_second_derivative(double q1, const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  const double P = spec.power;
  if (!(q1 >= 0.0) || !(q1 <= P)) throw std::invalid_argument("q1 must lie in [0, P]");
  if (q1 == 0.0 || q1 == P) {
    const auto b = boundary_partials_second(spec);
    return b.d2q2_at_q2_zero + b.d2q2_at_q1_zero - 2.0 * b.mixed_at_q1_zero;
  }
  const PowerSplit split = PowerSplit::along(q1, spec);
  const double d22 = partial_d2f_dq2dq2(split, spec, quad);
  const double d11 = q1 == 0.5 * P ? d22 : partial_d2f_dq1dq1(split, spec, quad);
  return d11 + d22 - 2.0 * partial_d2f_dq1dq2(split, spec, quad);
}

DerivativeReport derivative_report(const ChannelSpec& spec, const QuadratureSpec& quad) {
  require_timo(spec);
  DerivativeReport rep{};
  rep.boundary_first = boundary_partials_first(spec);
  rep.boundary_second = boundary_partials_second(spec);
  rep.d1_at_zero = total_first_derivative(0.0, spec, quad);
  rep.d2_at_zero = total_second_derivative(0.0, spec, quad);
  const PowerSplit half{0.5 * spec.power, 0.5 * spec.power};
  rep.dq2_at_half = partial_df_dq2(half, spec, quad);
  rep.d2q2_at_half = partial_d2f_dq2dq2(half, spec, quad);
  rep.mixed_at_half = partial_d2f_dq1dq2(half, spec, quad);
  rep.d1_at_half = 0.0;
  rep.d2_at_half = 2.0 * (rep.d2q2_at_half - rep.mixed_at_half);
  return rep;
}

ConjectureVerdict theorem1_check(const ChannelSpec& spec, const QuadratureSpec& quad, double tolerance) {
  require_timo(spec);
  if (!(tolerance >= 0.0)) throw std::invalid_argument("sign tolerance must be >= 0");
  enum class Sign { descends, ascends, undecided };
  auto classify = [tolerance](double v) {
    if (v <= -tolerance) return Sign::descends;
    if (v >= tolerance) return Sign::ascends;
    return Sign::undecided;
  };

  ConjectureVerdict out{};
  out.tolerance = tolerance;
  out.d1_at_zero = total_first_derivative(0.0, spec, quad);
  out.d2_at_zero = total_second_derivative(0.0, spec, quad);
  out.d1_at_half = 0.0;
  out.d2_at_half = total_second_derivative(0.5 * spec.power, spec, quad);

  Sign endpoint = classify(out.d1_at_zero);
  if (std::abs(out.d1_at_zero) <= tolerance) endpoint = classify(out.d2_at_zero);
  const Sign centre = classify(out.d2_at_half);

  if (endpoint == Sign::ascends || centre == Sign::ascends) {
    out.verdict = Verdict::conjecture_holds;
  } else if (endpoint == Sign::descends && centre == Sign::descends) {
    out.verdict = Verdict::counterexample;
  } else {
    out.verdict = Verdict::inconclusive;
  }
  return out;
}

MinSplit find_min_split(const ChannelSpec& spec, int grid_points, const QuadratureSpec& quad) {
  require_timo(spec);
  if (grid_points < 3) throw std::invalid_argument("find_min_split needs at least 3 grid points");
  const double P = spec.power;
  const double half = 0.5 * P;

  MinSplit out{};
  double worst_err = 0.0;
  auto f = [&](double q1) {
    const auto est = outage_timo(PowerSplit{q1, P - q1}, spec, quad);
    worst_err = std::max(worst_err, est.uncertainty);
    return est.value;
  };

  out.grid_q.resize(grid_points);
  out.grid_f.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    out.grid_q[i] = i == grid_points - 1 ? half : half * i / (grid_points - 1);
    out.grid_f[i] = f(out.grid_q[i]);
  }
  out.f_at_zero = out.grid_f.front();
  out.f_at_half = out.grid_f.back();

  const auto best = std::min_element(out.grid_f.begin(), out.grid_f.end()) - out.grid_f.begin();
  out.q_star = out.grid_q[best];
  out.f_star = out.grid_f[best];

  const double lo = out.grid_q[std::max<std::ptrdiff_t>(best - 1, 0)];
  const double hi = out.grid_q[std::min<std::ptrdiff_t>(best + 1, grid_points - 1)];
  const auto [q_refined, f_refined] = golden_section(f, lo, hi, 1e-4 * P);
  if (f_refined < out.f_star) {
    out.q_star = q_refined;
    out.f_star = f_refined;
  }
  out.err_bound = worst_err;
  return out;
}

}  // namespace outage
