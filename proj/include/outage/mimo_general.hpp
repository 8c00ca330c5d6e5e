#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "outage/channel.hpp"
#include "outage/parallel.hpp"
#include "outage/random.hpp"

namespace outage {

/// Diagonal power allocation for t transmitters.
struct PowerVector {
  std::vector<double> q;

  double total() const;
  std::size_t size() const { return q.size(); }
  /// Throws unless all entries are >= 0 and they sum to `power` within 1e-12.
  void validate(double power) const;
};

/// (P/k, ..., P/k, 0, ..., 0) with k active transmitters out of t.
PowerVector uniform_power_vector(int k, int t, double power);

/// Moves eps from the first active slot to the first idle slot. Requires k < t.
PowerVector perturb_prime(const PowerVector& base, int k, double eps);

/// Moves eps from the first active slot to the second. Requires k >= 2.
PowerVector perturb_double_prime(const PowerVector& base, int k, double eps);

/// ln of the joint density of the ordered eigenvalues of A*A for an n x m
/// complex Gaussian A whose entries have unit variance per real component
/// (E|A_ij|^2 = 2):
///   2^{-mn} pi^{m(m-1)} / (Gamma_m(n) Gamma_m(m)) e^{-sum/2} prod l^{n-m} prod_{i<j} (l_i - l_j)^2.
/// The density integrates to 1 over l_1 > ... > l_m, hence to m! over the orthant.
/// Throws std::domain_error for non-positive or repeated eigenvalues.
double lemma1_log_density(std::span<const double> lambdas, int m, int n);

/// The same law for channels normalized to E|H_ij|^2 = 1, whose Gram
/// eigenvalues are half of the unit-variance ones.
double lemma1_log_density_unit_power(std::span<const double> lambdas, int m, int n);

/// Eigenvalues of H1 H1* and their shifts 1 + q0 * lambda.
struct EigenSample {
  std::vector<double> lambdas;
  std::vector<double> shifted;

  static EigenSample from_lambdas(std::vector<double> lambdas, double q0);
};

/// det(I_r + H Q H*) for Q = diag(q0 I_{k-2}, qa, qb, 0) from the block reduction:
/// prod(shifted) * ((1 + qa m_a)(1 + qb m_b) - qa qb |xi_ab|^2).
/// Throws std::logic_error when xi_ab_sq violates Cauchy-Schwarz.
double reduced_determinant(const EigenSample& sample, double qa, double qb, double m_a, double m_b,
                           double xi_ab_sq);

/// Quadratic forms m_a = h_a* L^-1 h_a, m_b, |xi_ab|^2 with L = diag(shifted).
struct WeightedForms {
  double m_a;
  double m_b;
  double xi_ab_sq;
};
WeightedForms weighted_forms(const EigenSample& sample, const Eigen::VectorXcd& h_a, const Eigen::VectorXcd& h_b);

/// Power vector with k - 2 entries at q0, two deviants qa, qb and t - k zeros.
struct SpecialQ {
  double q0 = 0.0;
  double qa = 0.0;
  double qb = 0.0;
  int k = 2;
  int t = 2;

  PowerVector to_power_vector() const;
  void validate(const ChannelSpec& spec) const;
};

/// Outage probability for a SpecialQ by sampling the reduced generative model:
/// eigenvalues of H1 H1* (skipped for k = 2) and two fresh Gaussian columns.
OutageEstimate mc_outage_special_q(const SpecialQ& sq, const ChannelSpec& spec, std::uint64_t n,
                                   const RandomStream& stream, Execution exec = Execution::parallel);

/// One perturbation direction of the uniform-pattern test.
struct PairedDifference {
  double delta;      // estimated f(perturbed) - f(base)
  double std_error;  // standard error of the paired difference
  double second_order;  // delta / eps^2
  bool decrease_detected;  // delta < -3 std_error
};

enum class PatternStatus { rejected, not_rejected, inconclusive };

struct Theorem2Result {
  int k;
  int t;
  double eps;
  std::uint64_t n_samples;
  double f_base;
  double f_base_std_error;
  std::optional<PairedDifference> prime;         // absent when k = t
  std::optional<PairedDifference> double_prime;  // absent when k = 1
  PatternStatus status;
};

/// Tests whether the uniform pattern with k active transmitters is a local
/// minimum by estimating f(q') - f(q) and f(q'') - f(q) with common random
/// numbers. Each draw conditions on all but the norm of column 1, whose
/// Gamma(r, 1) law is integrated exactly, and the q'' estimate averages the two
/// orderings of its perturbed pair (f is permutation invariant). A pattern is
/// rejected when either difference lies below -3 standard errors.
Theorem2Result theorem2_check(int k, const ChannelSpec& spec, double eps, std::uint64_t n,
                              const RandomStream& stream, Execution exec = Execution::parallel);

/// eps used when the caller does not choose one: 0.025 P / k.
double default_theorem2_eps(int k, const ChannelSpec& spec);

std::string_view to_string(PatternStatus s);

}  // namespace outage
