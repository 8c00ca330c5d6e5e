#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Core>

#include "outage/channel.hpp"
#include "outage/parallel.hpp"
#include "outage/random.hpp"

namespace outage {

/// Circularly symmetric complex Gaussian with E|z|^2 = 1: real and imaginary
/// parts are independent N(0, 1/2).
class ComplexNormal {
 public:
  ComplexNormal() : normal_(0.0, std::sqrt(0.5)) {}

  template <typename Engine>
  std::complex<double> operator()(Engine& engine) {
    const double re = normal_(engine);
    const double im = normal_(engine);
    return {re, im};
  }

 private:
  std::normal_distribution<double> normal_;
};

/// Fills H (already sized rows x cols) with i.i.d. ComplexNormal entries, column-major.
void fill_channel(Eigen::MatrixXcd& H, Philox4x32& engine, ComplexNormal& normal);

/// One rows x cols channel draw from the first substream of `stream`.
Eigen::MatrixXcd sample_channel(int rows, int cols, const RandomStream& stream);

/// ln det(I_r + H diag(q) H*) through a Cholesky factorization; returns NaN if
/// the factorization fails.
double log_det_channel(const Eigen::MatrixXcd& H, std::span<const double> q_diag);

/// Fraction of channel draws with ln det(I_r + H diag(q) H*) < R.
OutageEstimate mc_outage_direct(std::span<const double> q_diag, const ChannelSpec& spec, std::uint64_t n,
                                const RandomStream& stream, Execution exec = Execution::parallel);

/// Fraction of draws with 1 + S + T + S T rho < e^R, where S ~ Gamma(r, q1),
/// T ~ Gamma(r, q2) and rho ~ Beta(r - 1, 1) (rho = 0 when r = 1).
OutageEstimate mc_outage_timo_reduced(PowerSplit split, const ChannelSpec& spec, std::uint64_t n,
                                      const RandomStream& stream, Execution exec = Execution::parallel);

}  // namespace outage
