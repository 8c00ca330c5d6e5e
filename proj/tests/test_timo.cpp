#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "outage/quadrature.hpp"
#include "outage/specfun.hpp"
#include "outage/timo.hpp"
#include "oracles.hpp"

using namespace outage;

namespace {

const double kLn3 = std::log(3.0);
const ChannelSpec kCounter = ChannelSpec::timo(2, kLn3, 0.5);

using oracle::kTight;

double f(double q1, double q2, const ChannelSpec& spec, const QuadratureSpec& quad = kTight) {
  return oracle::outage_free(q1, q2, spec, quad);
}

}  // namespace

TEST_CASE("outage_timo closed form on the boundary") {
  const auto est = outage_timo({0.5, 0.0}, kCounter);
  CHECK(std::abs(est.value - (1.0 - 5.0 * std::exp(-4.0))) < 1e-12);
  CHECK(est.method == Method::quadrature);
  CHECK(est.n_samples == 0);
}

TEST_CASE("outage_timo is symmetric under swapping the split") {
  const QuadratureSpec quad;
  for (double rate : {0.5, kLn3, 2.0}) {
    for (double q1 : {0.05, 0.2, 0.3, 0.45}) {
      const auto spec = ChannelSpec::timo(2, rate, 0.5);
      const auto a = outage_timo({q1, 0.5 - q1}, spec, quad);
      const auto b = outage_timo({0.5 - q1, q1}, spec, quad);
      CHECK(std::abs(a.value - b.value) <= 2.0 * std::max(quad.abs_tol, quad.rel_tol * a.value));
    }
  }
  for (int r : {1, 3, 4}) {
    const auto spec = ChannelSpec::timo(r, 1.0 * r, 0.8 * r);
    const double P = spec.power;
    const auto a = outage_timo({0.3 * P, 0.7 * P}, spec);
    const auto b = outage_timo({0.7 * P, 0.3 * P}, spec);
    CHECK(std::abs(a.value - b.value) <= 2.0 * std::max(1e-10, 1e-8 * a.value));
  }
}

TEST_CASE("the counterexample split beats both conjectured splits") {
  const double mid = outage_timo({0.075, 0.425}, kCounter).value;
  CHECK(mid < outage_timo({0.0, 0.5}, kCounter).value);
  CHECK(mid < outage_timo({0.25, 0.25}, kCounter).value);
}

TEST_CASE("outage_timo is nondecreasing in the rate") {
  for (double alpha : {0.0, 0.25, 0.5}) {
    double prev = 0.0;
    for (double rate : {0.5, 1.0, 1.5, 2.0}) {
      const auto spec = ChannelSpec::timo(2, rate, 0.5);
      const double v = outage_timo(PowerSplit{alpha * 0.5, (1 - alpha) * 0.5}, spec).value;
      CHECK(v >= prev - 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("outage_timo is nonincreasing in the power at a fixed split fraction") {
  for (double alpha : {0.0, 0.25, 0.5}) {
    double prev = 1.0;
    for (double P : {0.25, 0.5, 1.0, 2.0}) {
      const auto spec = ChannelSpec::timo(2, kLn3, P);
      const double v = outage_timo(PowerSplit{alpha * P, (1 - alpha) * P}, spec).value;
      CHECK(v <= prev + 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("outage_timo approaches the boundary value continuously") {
  const double eps = 1e-4;
  const double limit = outage_timo({0.5, 0.0}, kCounter).value;
  CHECK(std::abs(outage_timo({0.5 - eps, eps}, kCounter).value - limit) < 1e-3);
}

TEST_CASE("outage_timo values are probabilities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const int r = 1 + i % 4;
    const auto spec = ChannelSpec::timo(r, 0.05 + 4.0 * U(rng), 0.05 + 4.0 * U(rng));
    const double q1 = spec.power * U(rng);
    const auto est = outage_timo(PowerSplit::along(q1, spec), spec);
    CHECK(est.value >= 0.0);
    CHECK(est.value <= 1.0);
    CHECK(est.uncertainty >= 0.0);
  }
}

TEST_CASE("r = 1 reduces to the scalar sum of two exponentials") {
  // Pr[S + T < u] for S ~ Exp(q1), T ~ Exp(q2), q1 != q2.
  const auto spec = ChannelSpec::timo(1, 1.0, 1.0);
  const double u = std::expm1(1.0), q1 = 0.3, q2 = 0.7;
  const double ref = 1.0 - (q1 * std::exp(-u / q1) - q2 * std::exp(-u / q2)) / (q1 - q2);
  CHECK(std::abs(outage_timo({q1, q2}, spec).value - ref) < 1e-9);
}

TEST_CASE("outage_timo argument validation") {
  CHECK_THROWS_AS(outage_timo({0.3, 0.3}, kCounter), std::invalid_argument);
  CHECK_THROWS_AS(outage_timo({-0.1, 0.6}, kCounter), std::invalid_argument);
  ChannelSpec three = kCounter;
  three.t = 3;
  CHECK_THROWS_AS(outage_timo({0.25, 0.25}, three), std::invalid_argument);
  CHECK_THROWS_AS(ChannelSpec::timo(0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ChannelSpec::timo(2, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ChannelSpec::timo(2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("first partials") {
  SUBCASE("symmetric point") {
    const PowerSplit half{0.25, 0.25};
    CHECK(std::abs(partial_df_dq2(half, kCounter) - partial_df_dq1(half, kCounter)) < 1e-9);
  }
  SUBCASE("central difference in q2 with q1 fixed") {
    const double h = 1e-4;
    const double fd = (f(0.2, 0.3 + h, kCounter) - f(0.2, 0.3 - h, kCounter)) / (2 * h);
    CHECK(std::abs(partial_df_dq2({0.2, 0.3}, kCounter) - fd) < 1e-5);
  }
  SUBCASE("more power never hurts") { CHECK(partial_df_dq2({0.3, 0.2}, kCounter) < 0.0); }
  SUBCASE("boundary points are rejected") {
    CHECK_THROWS_AS(partial_df_dq2({0.0, 0.5}, kCounter), std::domain_error);
    CHECK_THROWS_AS(partial_d2f_dq1dq2({0.5, 0.0}, kCounter), std::domain_error);
  }
}

TEST_CASE("second partials") {
  SUBCASE("q2 second difference at the centre") {
    const double h = 1e-3;
    const double fd = (f(0.25, 0.25 + h, kCounter) - 2 * f(0.25, 0.25, kCounter) + f(0.25, 0.25 - h, kCounter)) / (h * h);
    CHECK(std::abs(partial_d2f_dq2dq2({0.25, 0.25}, kCounter) - fd) < 1e-4);
  }
  SUBCASE("swap identity") {
    CHECK(std::abs(partial_d2f_dq2dq2({0.2, 0.3}, kCounter) - partial_d2f_dq1dq1({0.3, 0.2}, kCounter)) < 1e-9);
  }
  SUBCASE("mixed partial against a cross difference") {
    const double h = 1e-3;
    const double fd = (f(0.2 + h, 0.3 + h, kCounter) - f(0.2 + h, 0.3 - h, kCounter) - f(0.2 - h, 0.3 + h, kCounter) +
                       f(0.2 - h, 0.3 - h, kCounter)) /
                      (4 * h * h);
    CHECK(std::abs(partial_d2f_dq1dq2({0.2, 0.3}, kCounter) - fd) < 1e-4);
  }
  SUBCASE("mixed partial is symmetric") {
    CHECK(std::abs(partial_d2f_dq1dq2({0.2, 0.3}, kCounter) - partial_d2f_dq1dq2({0.3, 0.2}, kCounter)) < 1e-8);
  }
}

TEST_CASE("every analytic partial matches finite differences at random interior points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double h1 = 1e-4, h2 = 1e-3;
  for (int i = 0; i < 5; ++i) {
    const int r = 2 + i % 2;
    const auto spec = ChannelSpec::timo(r, 0.4 + 1.2 * U(rng), 0.3 + 0.9 * U(rng));
    const double q1 = spec.power * (0.15 + 0.7 * U(rng));
    const double q2 = spec.power - q1;
    CAPTURE(r);
    CAPTURE(spec.rate);
    CAPTURE(q1);
    CAPTURE(q2);
    const PowerSplit s{q1, q2};

    const double d2 = (f(q1, q2 + h1, spec) - f(q1, q2 - h1, spec)) / (2 * h1);
    const double d1 = (f(q1 + h1, q2, spec) - f(q1 - h1, q2, spec)) / (2 * h1);
    CHECK(std::abs(partial_df_dq2(s, spec) - d2) < 1e-4);
    CHECK(std::abs(partial_df_dq1(s, spec) - d1) < 1e-4);

    const double f0 = f(q1, q2, spec);
    const double d22 = (f(q1, q2 + h2, spec) - 2 * f0 + f(q1, q2 - h2, spec)) / (h2 * h2);
    const double d11 = (f(q1 + h2, q2, spec) - 2 * f0 + f(q1 - h2, q2, spec)) / (h2 * h2);
    const double d12 = (f(q1 + h2, q2 + h2, spec) - f(q1 + h2, q2 - h2, spec) - f(q1 - h2, q2 + h2, spec) +
                        f(q1 - h2, q2 - h2, spec)) /
                       (4 * h2 * h2);
    CHECK(std::abs(partial_d2f_dq2dq2(s, spec) - d22) < 1e-4);
    CHECK(std::abs(partial_d2f_dq1dq1(s, spec) - d11) < 1e-4);
    CHECK(std::abs(partial_d2f_dq1dq2(s, spec) - d12) < 1e-4);
  }
}

TEST_CASE("boundary closed forms at the counterexample parameters") {
  const double e4 = std::exp(-4.0);
  const auto first = boundary_partials_first(kCounter);
  CHECK(std::abs(first.at_q1_zero + 32.0 * e4) < 1e-14);
  CHECK(std::abs(first.at_q2_zero + 32.0 * e4) < 1e-14);

  const auto second = boundary_partials_second(kCounter);
  CHECK(std::abs(second.d2q2_at_q1_zero + 64.0 * e4) < 1e-13);
  CHECK(second.mixed_at_q1_zero == second.mixed_at_q2_zero);
  CHECK(std::abs(total_second_derivative(0.0, kCounter) + 8.0 * e4) < 1e-13);
}

TEST_CASE("boundary closed forms agree with one-sided differences of the interior formulas") {
  // The interior integrals are valid up to the boundary; evaluate them at a small
  // q and extrapolate linearly to 0.
  // Near the boundary the integrands steepen; 1e-12 absolute is ample for a 1e-3 comparison.
  const QuadratureSpec kNearBoundary{1e-12, 1e-10, 6000};
  for (int r : {2, 3}) {
    const auto spec = ChannelSpec::timo(r, 0.8 * r, 0.6 * r);
    const double P = spec.power;
    const double a = 1e-3 * P, b = 2e-3 * P;
    auto extrapolate = [&](auto fn) { return 2.0 * fn(a) - fn(b); };
    const auto first = boundary_partials_first(spec);
    const auto second = boundary_partials_second(spec);
    CAPTURE(r);
    CHECK(std::abs(extrapolate([&](double q) { return partial_df_dq2({q, P - q}, spec, kNearBoundary); }) -
                   first.at_q1_zero) < 1e-4);
    CHECK(std::abs(extrapolate([&](double q) { return partial_df_dq2({P - q, q}, spec, kNearBoundary); }) -
                   first.at_q2_zero) < 1e-3);
    CHECK(std::abs(extrapolate([&](double q) { return partial_d2f_dq2dq2({q, P - q}, spec, kNearBoundary); }) -
                   second.d2q2_at_q1_zero) < 1e-3);
    CHECK(std::abs(extrapolate([&](double q) { return partial_d2f_dq2dq2({P - q, q}, spec, kNearBoundary); }) -
                   second.d2q2_at_q2_zero) < 2e-2);
    CHECK(std::abs(extrapolate([&](double q) { return partial_d2f_dq1dq2({q, P - q}, spec, kNearBoundary); }) -
                   second.mixed_at_q1_zero) < 2e-2);
  }
}

TEST_CASE("total derivatives along the trace constraint") {
  SUBCASE("first derivative vanishes at both test points") {
    CHECK(total_first_derivative(0.25, kCounter) == 0.0);
    CHECK(std::abs(total_first_derivative(0.0, kCounter)) <= 1e-12);
  }
  SUBCASE("first derivative against a central difference") {
    const double h = 1e-4;
    const double fd = (f(0.1 + h, 0.4 - h, kCounter) - f(0.1 - h, 0.4 + h, kCounter)) / (2 * h);
    CHECK(std::abs(total_first_derivative(0.1, kCounter) - fd) < 1e-5);
  }
  SUBCASE("second derivative against a second difference") {
    const double h = 1e-3;
    const double fd = (f(0.1 + h, 0.4 - h, kCounter) - 2 * f(0.1, 0.4, kCounter) + f(0.1 - h, 0.4 + h, kCounter)) / (h * h);
    CHECK(std::abs(total_second_derivative(0.1, kCounter) - fd) < 1e-4);
  }
  SUBCASE("second derivative at the centre") {
    CHECK(std::abs(total_second_derivative(0.25, kCounter) + 0.1014) < 5e-4);
  }
  SUBCASE("mirror point q1 = P") {
    CHECK(std::abs(total_first_derivative(0.5, kCounter) + total_first_derivative(0.0, kCounter)) < 1e-15);
    CHECK(total_second_derivative(0.5, kCounter) == total_second_derivative(0.0, kCounter));
  }
}

TEST_CASE("centre second derivative as one double integral over (s, rho)") {
  // At q1 = q2 = q the chain rule gives d2 = 2 (f_22 - f_12); for r = 2 both
  // integrands share the weight s w^2 e^{-w/q - s/q} / q^6 on [0, u] x [0, 1].
  const double q = 0.25, u = 2.0;
  auto gamma = [&](double s, double rho) {
    const double w = (u - s) / (1.0 + rho * s);
    const double common = w * w * std::exp(-w / q - s / q) * s / std::pow(q, 6);
    return 2.0 * common * ((3.0 - w / q) - (2.0 - s / q));
  };
  const auto res = integrate_2d(gamma, Rectangle{0.0, u, 0.0, 1.0}, QuadratureSpec{1e-12, 1e-10, 4000});
  CHECK(std::abs(res.value + 0.1014) < 5e-4);
  CHECK(std::abs(res.value - total_second_derivative(q, kCounter)) < 1e-7);
}

TEST_CASE("derivative report") {
  const auto rep = derivative_report(kCounter);
  CHECK(rep.d1_at_half == 0.0);
  CHECK(std::abs(rep.d2_at_zero + 8.0 * std::exp(-4.0)) < 1e-12);
  CHECK(std::abs(rep.d2_at_half + 0.1014) < 5e-4);
  CHECK(std::abs(rep.d2_at_half - 2.0 * (rep.d2q2_at_half - rep.mixed_at_half)) < 1e-9);
}

TEST_CASE("theorem1_check") {
  SUBCASE("counterexample parameters") {
    const auto v = theorem1_check(kCounter);
    CHECK(v.counterexample_found());
    CHECK(v.d1_at_half == 0.0);
    CHECK(v.tolerance == kDefaultSignTolerance);
  }
  SUBCASE("conjecture region") {
    const auto v = theorem1_check(ChannelSpec::timo(2, 4.0, 4.0));
    CHECK_FALSE(v.counterexample_found());
    CHECK(v.verdict == Verdict::conjecture_holds);
  }
  SUBCASE("a huge tolerance makes every sign inconclusive") {
    const auto v = theorem1_check(kCounter, {}, 10.0);
    CHECK(v.verdict == Verdict::inconclusive);
  }
}

TEST_CASE("find_min_split") {
  SUBCASE("counterexample parameters") {
    const auto m = find_min_split(kCounter, 21);
    CHECK(m.q_star > 0.05);
    CHECK(m.q_star < 0.1);
    CHECK(m.f_star < std::min(m.f_at_zero, m.f_at_half) - 10.0 * m.err_bound);
    CHECK(m.grid_q.size() == 21);
    CHECK(m.grid_f.size() == 21);
  }
  SUBCASE("grid oracle at R = P = 4 picks an endpoint or the centre") {
    const auto spec = ChannelSpec::timo(2, 4.0, 4.0);
    const auto m = find_min_split(spec, 41);
    CHECK((m.q_star == 0.0 || m.q_star == 2.0));
    CHECK(m.f_star <= std::min(m.f_at_zero, m.f_at_half));
  }
  SUBCASE("minimizer dominates the conjectured candidates") {
    for (double rate : {0.3, 1.0, 2.5}) {
      for (double P : {0.3, 1.5}) {
        const auto m = find_min_split(ChannelSpec::timo(2, rate, P), 11);
        CHECK(m.f_star <= std::min(m.f_at_zero, m.f_at_half));
      }
    }
  }
  SUBCASE("grid size validation") { CHECK_THROWS_AS(find_min_split(kCounter, 1), std::invalid_argument); }
}
