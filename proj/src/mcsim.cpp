#include "outage/mcsim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace outage {

namespace {

OutageEstimate finish(const Tally& tally, Method method) {
  OutageEstimate est;
  est.method = method;
  est.n_samples = tally.draws;
  est.evaluation_errors = tally.errors;
  if (tally.draws > 0) {
    const double p = static_cast<double>(tally.hits) / static_cast<double>(tally.draws);
    est.value = p;
    est.uncertainty = std::sqrt(p * (1.0 - p) / static_cast<double>(tally.draws));
  }
  return est;
}

void require_samples(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("sample count n must be positive");
}

}  // namespace

void fill_channel(Eigen::MatrixXcd& H, Philox4x32& engine, ComplexNormal& normal) {
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    for (Eigen::Index i = 0; i < H.rows(); ++i) H(i, j) = normal(engine);
  }
}

Eigen::MatrixXcd sample_channel(int rows, int cols, const RandomStream& stream) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("channel dimensions must be >= 1");
  Eigen::MatrixXcd H(rows, cols);
  auto engine = stream.engine();
  ComplexNormal normal;
  fill_channel(H, engine, normal);
  return H;
}

double log_det_channel(const Eigen::MatrixXcd& H, std::span<const double> q_diag) {
  const Eigen::Index r = H.rows();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(r, r);
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    if (q_diag[j] != 0.0) M.noalias() += q_diag[j] * H.col(j) * H.col(j).adjoint();
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(M);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) sum += std::log(llt.matrixLLT()(i, i).real());
  return 2.0 * sum;
}

OutageEstimate mc_outage_direct(std::span<const double> q_diag, const ChannelSpec& spec, std::uint64_t n,
                                const RandomStream& stream, Execution exec) {
  spec.validate();
  require_samples(n);
  if (static_cast<int>(q_diag.size()) != spec.t) throw std::invalid_argument("power vector length must equal t");
  for (double q : q_diag) {
    if (!(q >= 0.0)) throw std::invalid_argument("powers must be >= 0");
  }

  const auto tally = run_chunked<Tally>(n, stream, exec, [&](Philox4x32& engine, std::uint64_t count) {
    Eigen::MatrixXcd H(spec.r, spec.t);
    Eigen::MatrixXcd M(spec.r, spec.r);
    Eigen::LLT<Eigen::MatrixXcd> llt(spec.r);
    ComplexNormal normal;
    Tally t;
    for (std::uint64_t i = 0; i < count; ++i) {
      fill_channel(H, engine, normal);
      M.setIdentity();
      for (int j = 0; j < spec.t; ++j) {
        if (q_diag[j] != 0.0) M.noalias() += q_diag[j] * H.col(j) * H.col(j).adjoint();
      }
      llt.compute(M);
      double log_det = 0.0;
      bool ok = llt.info() == Eigen::Success;
      for (int k = 0; ok && k < spec.r; ++k) {
        const double d = llt.matrixLLT()(k, k).real();
        ok = d > 0.0 && std::isfinite(d);
        log_det += 2.0 * std::log(d);
      }
      if (!ok) {
        ++t.errors;
        continue;
      }
      ++t.draws;
      if (log_det < spec.rate) ++t.hits;
    }
    return t;
  });
  return finish(tally, Method::mc_direct);
}

OutageEstimate mc_outage_timo_reduced(PowerSplit split, const ChannelSpec& spec, std::uint64_t n,
                                      const RandomStream& stream, Execution exec) {
  spec.validate();
  if (spec.t != 2) throw std::invalid_argument("reduced sampler requires t = 2");
  split.validate(spec);
  require_samples(n);

  const double threshold = spec.det_threshold();
  const int r = spec.r;
  const auto tally = run_chunked<Tally>(n, stream, exec, [&](Philox4x32& engine, std::uint64_t count) {
    std::gamma_distribution<double> gamma(r, 1.0);
    Tally t;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double s = split.q1 > 0.0 ? split.q1 * gamma(engine) : 0.0;
      const double tt = split.q2 > 0.0 ? split.q2 * gamma(engine) : 0.0;
      // rho ~ Beta(r-1, 1) by inversion: rho = U^{1/(r-1)}.
      const double rho = r >= 2 ? std::pow(engine.uniform_open(), 1.0 / (r - 1)) : 0.0;
      ++t.draws;
      if (1.0 + s + tt + s * tt * rho < threshold) ++t.hits;
    }
    return t;
  });
  return finish(tally, Method::mc_reduced);
}

}  // namespace outage
