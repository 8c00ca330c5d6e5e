#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace outage {

/// Antenna counts, target rate (nats per channel use) and total transmit power.
struct ChannelSpec {
  int t = 2;
  int r = 2;
  double rate = 0.0;
  double power = 0.0;

  /// e^R - 1, the threshold on the non-constant part of det(I + HQH*).
  double u() const;
  /// e^R, the threshold on the determinant itself.
  double det_threshold() const;
  void validate() const;

  static ChannelSpec timo(int r, double rate, double power);
};

/// Diagonal power allocation (q1, q2) for two transmitters.
struct PowerSplit {
  double q1 = 0.0;
  double q2 = 0.0;

  PowerSplit swapped() const { return {q2, q1}; }
  bool interior() const { return q1 > 0.0 && q2 > 0.0; }
  /// Throws std::invalid_argument unless q1, q2 >= 0 and q1 + q2 = P within 1e-12.
  void validate(const ChannelSpec& spec) const;

  /// (q1, P - q1) on the trace constraint.
  static PowerSplit along(double q1, const ChannelSpec& spec);
};

enum class Method { quadrature, mc_direct, mc_reduced, mc_special_q };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// A probability with its uncertainty: quadrature error bound or Monte Carlo
/// standard error. n_samples is 0 for deterministic methods.
struct OutageEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
  std::uint64_t n_samples = 0;
  Method method = Method::quadrature;
  /// Draws whose factorization failed; excluded from n_samples and reported here.
  std::uint64_t evaluation_errors = 0;
};

enum class Verdict { conjecture_holds, counterexample, inconclusive, numerically_unstable };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

}  // namespace outage
