#include "outage/mimo_general.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "outage/mcsim.hpp"
#include "outage/specfun.hpp"

namespace outage {

namespace {

constexpr double kSumSlack = 1e-12;

void require_uniform_base(const PowerVector& base, int k) {
  const int t = static_cast<int>(base.size());
  if (k < 1 || k > t) throw std::invalid_argument("active count k must satisfy 1 <= k <= t");
  const double level = base.q[0];
  for (int i = 0; i < t; ++i) {
    const double expected = i < k ? level : 0.0;
    if (base.q[i] != expected || !(level > 0.0)) {
      throw std::invalid_argument("base vector is not the uniform pattern with k active transmitters");
    }
  }
}

void require_eps(double eps, double level) {
  if (!(eps >= 0.0) || !(eps < level)) throw std::invalid_argument("eps must satisfy 0 <= eps < P/k");
}

double det_from_forms(double shifted_product, double qa, double qb, const WeightedForms& w) {
  return shifted_product * ((1.0 + qa * w.m_a) * (1.0 + qb * w.m_b) - qa * qb * w.xi_ab_sq);
}

}  // namespace

double PowerVector::total() const { return std::accumulate(q.begin(), q.end(), 0.0); }

void PowerVector::validate(double power) const {
  for (double v : q) {
    if (!(v >= 0.0)) throw std::invalid_argument("power entries must be >= 0");
  }
  if (std::abs(total() - power) > kSumSlack) throw std::invalid_argument("power entries must sum to P");
}

PowerVector uniform_power_vector(int k, int t, double power) {
  if (t < 1 || k < 1 || k > t) throw std::invalid_argument("uniform pattern requires 1 <= k <= t");
  if (!(power > 0.0)) throw std::invalid_argument("power must be > 0");
  PowerVector v{std::vector<double>(t, 0.0)};
  std::fill_n(v.q.begin(), k, power / k);
  return v;
}

PowerVector perturb_prime(const PowerVector& base, int k, double eps) {
  require_uniform_base(base, k);
  if (k == static_cast<int>(base.size())) throw std::invalid_argument("perturb_prime needs an idle slot (k < t)");
  require_eps(eps, base.q[0]);
  PowerVector out = base;
  out.q[0] -= eps;
  out.q[k] = eps;
  return out;
}

PowerVector perturb_double_prime(const PowerVector& base, int k, double eps) {
  require_uniform_base(base, k);
  if (k < 2) throw std::invalid_argument("perturb_double_prime needs two active slots (k >= 2)");
  require_eps(eps, base.q[0]);
  PowerVector out = base;
  out.q[0] -= eps;
  out.q[1] += eps;
  return out;
}

double lemma1_log_density(std::span<const double> lambdas, int m, int n) {
  if (m < 1 || n < m) throw std::domain_error("eigenvalue density requires n >= m >= 1");
  if (static_cast<int>(lambdas.size()) != m) throw std::invalid_argument("expected m eigenvalues");
  double sum = 0.0;
  double log_sum = 0.0;
  double vandermonde = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!(lambdas[i] > 0.0)) throw std::domain_error("eigenvalues must be > 0");
    sum += lambdas[i];
    log_sum += std::log(lambdas[i]);
    for (int j = i + 1; j < m; ++j) {
      const double gap = std::abs(lambdas[i] - lambdas[j]);
      if (gap == 0.0) throw std::domain_error("repeated eigenvalue: density vanishes");
      vandermonde += std::log(gap);
    }
  }
  return -m * n * std::numbers::ln2 + m * (m - 1) * std::log(std::numbers::pi) -
         complex_multivariate_log_gamma(m, n) - complex_multivariate_log_gamma(m, m) - 0.5 * sum +
         (n - m) * log_sum + 2.0 * vandermonde;
}

double lemma1_log_density_unit_power(std::span<const double> lambdas, int m, int n) {
  std::vector<double> scaled(lambdas.begin(), lambdas.end());
  for (double& l : scaled) l *= 2.0;
  return lemma1_log_density(scaled, m, n) + m * std::numbers::ln2;
}

EigenSample EigenSample::from_lambdas(std::vector<double> lambdas, double q0) {
  EigenSample s;
  s.shifted.reserve(lambdas.size());
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw std::invalid_argument("eigenvalues must be >= 0");
    s.shifted.push_back(1.0 + q0 * l);
  }
  s.lambdas = std::move(lambdas);
  return s;
}

double reduced_determinant(const EigenSample& sample, double qa, double qb, double m_a, double m_b,
                           double xi_ab_sq) {
  if (!(m_a >= 0.0) || !(m_b >= 0.0) || !(xi_ab_sq >= 0.0)) {
    throw std::invalid_argument("quadratic forms must be >= 0");
  }
  if (xi_ab_sq > m_a * m_b * (1.0 + 1e-12) + 1e-300) {
    throw std::logic_error("Cauchy-Schwarz violated: |xi_ab|^2 > m_a m_b");
  }
  double product = 1.0;
  for (double s : sample.shifted) product *= s;
  return det_from_forms(product, qa, qb, {m_a, m_b, xi_ab_sq});
}

WeightedForms weighted_forms(const EigenSample& sample, const Eigen::VectorXcd& h_a, const Eigen::VectorXcd& h_b) {
  WeightedForms w{0.0, 0.0, 0.0};
  std::complex<double> xi{0.0, 0.0};
  for (std::size_t i = 0; i < sample.shifted.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double inv = 1.0 / sample.shifted[i];
    w.m_a += std::norm(h_a[idx]) * inv;
    w.m_b += std::norm(h_b[idx]) * inv;
    xi += std::conj(h_a[idx]) * h_b[idx] * inv;
  }
  w.xi_ab_sq = std::norm(xi);
  return w;
}

PowerVector SpecialQ::to_power_vector() const {
  PowerVector v{std::vector<double>(t, 0.0)};
  for (int i = 0; i < k - 2; ++i) v.q[i] = q0;
  v.q[k - 2] = qa;
  v.q[k - 1] = qb;
  return v;
}

void SpecialQ::validate(const ChannelSpec& spec) const {
  if (t != spec.t) throw std::invalid_argument("SpecialQ t must match the channel's t");
  if (k < 2 || k > t) throw std::invalid_argument("SpecialQ requires 2 <= k <= t");
  if (!(qa > 0.0) || !(qb > 0.0)) throw std::invalid_argument("deviant powers qa, qb must be > 0");
  if (k > 2 && !(q0 > 0.0)) throw std::invalid_argument("common power q0 must be > 0");
  to_power_vector().validate(spec.power);
}

OutageEstimate mc_outage_special_q(const SpecialQ& sq, const ChannelSpec& spec, std::uint64_t n,
                                   const RandomStream& stream, Execution exec) {
  spec.validate();
  sq.validate(spec);
  if (n == 0) throw std::invalid_argument("sample count n must be positive");
  const int r = spec.r;
  const int uniform_cols = sq.k - 2;
  const double threshold = spec.det_threshold();

  const auto tally = run_chunked<Tally>(n, stream, exec, [&](Philox4x32& engine, std::uint64_t count) {
    ComplexNormal normal;
    Eigen::MatrixXcd H1(r, std::max(uniform_cols, 1));
    // The nonzero spectrum of H1 H1* equals that of the smaller Gram matrix H1* H1;
    // the remaining eigenvalues are 0. Their order is irrelevant because h_a, h_b
    // are isotropic.
    const int gram = std::min(r, uniform_cols);
    Eigen::MatrixXcd G(std::max(gram, 1), std::max(gram, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(std::max(gram, 1));
    Eigen::VectorXcd ha(r), hb(r);
    EigenSample sample;
    sample.lambdas.assign(r, 0.0);
    sample.shifted.assign(r, 1.0);
    Tally t;
    for (std::uint64_t i = 0; i < count; ++i) {
      double product = 1.0;
      if (uniform_cols > 0) {
        fill_channel(H1, engine, normal);
        if (uniform_cols <= r) {
          G.noalias() = H1.adjoint() * H1;
        } else {
          G.noalias() = H1 * H1.adjoint();
        }
        eig.compute(G, Eigen::EigenvaluesOnly);
        for (int j = 0; j < r; ++j) {
          const double l = j < gram ? std::max(0.0, eig.eigenvalues()[j]) : 0.0;
          sample.lambdas[j] = l;
          sample.shifted[j] = 1.0 + sq.q0 * l;
          product *= sample.shifted[j];
        }
      }
      for (int j = 0; j < r; ++j) ha[j] = normal(engine);
      for (int j = 0; j < r; ++j) hb[j] = normal(engine);
      const double det = det_from_forms(product, sq.qa, sq.qb, weighted_forms(sample, ha, hb));
      ++t.draws;
      if (det < threshold) ++t.hits;
    }
    return t;
  });

  OutageEstimate est;
  est.method = Method::mc_special_q;
  est.n_samples = tally.draws;
  const double p = static_cast<double>(tally.hits) / static_cast<double>(tally.draws);
  est.value = p;
  est.uncertainty = std::sqrt(p * (1.0 - p) / static_cast<double>(tally.draws));
  return est;
}

double default_theorem2_eps(int k, const ChannelSpec& spec) { return 0.025 * spec.power / k; }

namespace {

struct Theorem2Acc {
  Moments base;
  Moments prime;
  Moments double_prime;

  void merge(const Theorem2Acc& o) {
    base.merge(o.base);
    prime.merge(o.prime);
    double_prime.merge(o.double_prime);
  }
};

// Pr[det(I + H diag(q) H*) < e^R | all of H except |h_1|^2], with |h_1|^2 ~ Gamma(r, 1):
// det = det(M) (1 + q_1 g d* M^-1 d) where M excludes column 1 and d = h_1 / |h_1|.
class ConditionalOutage {
 public:
  ConditionalOutage(int r, double threshold) : r_(r), threshold_(threshold), M_(r, r), llt_(r), y_(r) {}

  double operator()(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& direction, std::span<const double> q) {
    M_.setIdentity();
    for (Eigen::Index j = 1; j < H.cols(); ++j) {
      if (q[j] != 0.0) M_.noalias() += q[j] * H.col(j) * H.col(j).adjoint();
    }
    llt_.compute(M_);
    double det = 1.0;
    for (int i = 0; i < r_; ++i) det *= std::norm(llt_.matrixLLT()(i, i));
    y_ = llt_.matrixL().solve(direction);
    const double a = y_.squaredNorm();
    const double x = (threshold_ / det - 1.0) / (q[0] * a);
    if (!(x > 0.0)) return 0.0;
    return reg_lower_gamma(r_, x);
  }

 private:
  int r_;
  double threshold_;
  Eigen::MatrixXcd M_;
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  Eigen::VectorXcd y_;
};

PairedDifference summarize(const Moments& m, double eps) {
  PairedDifference d{};
  d.delta = m.mean;
  d.std_error = m.std_error();
  d.second_order = eps > 0.0 ? m.mean / (eps * eps) : 0.0;
  d.decrease_detected = m.mean < -3.0 * d.std_error;
  return d;
}

}  // namespace

Theorem2Result theorem2_check(int k, const ChannelSpec& spec, double eps, std::uint64_t n,
                              const RandomStream& stream, Execution exec) {
  spec.validate();
  const int t = spec.t;
  if (k < 1 || k > t) throw std::invalid_argument("active count k must satisfy 1 <= k <= t");
  if (n == 0) throw std::invalid_argument("sample count n must be positive");
  const double level = spec.power / k;
  if (!(eps >= 0.0) || eps > 0.05 * level * (1.0 + 1e-12)) {
    throw std::invalid_argument("eps must satisfy 0 <= eps <= 0.05 P/k");
  }

  const bool has_prime = k < t;
  const bool has_double_prime = k >= 2;
  const PowerVector base = uniform_power_vector(k, t, spec.power);
  const PowerVector prime = has_prime ? perturb_prime(base, k, eps) : base;
  const PowerVector pair_a = has_double_prime ? perturb_double_prime(base, k, eps) : base;
  PowerVector pair_b = pair_a;
  if (has_double_prime) std::swap(pair_b.q[0], pair_b.q[1]);

  const int cols = has_prime ? k + 1 : k;
  const int r = spec.r;
  const double threshold = spec.det_threshold();

  const auto acc = run_chunked<Theorem2Acc>(n, stream, exec, [&](Philox4x32& engine, std::uint64_t count) {
    ComplexNormal normal;
    ConditionalOutage conditional(r, threshold);
    Eigen::MatrixXcd H(r, cols);
    Eigen::VectorXcd direction(r);
    Theorem2Acc a;
    for (std::uint64_t i = 0; i < count; ++i) {
      fill_channel(H, engine, normal);
      direction = H.col(0).normalized();
      const double f_base = conditional(H, direction, base.q);
      a.base.add(f_base);
      if (has_prime) a.prime.add(conditional(H, direction, prime.q) - f_base);
      if (has_double_prime) {
        const double fa = conditional(H, direction, pair_a.q);
        const double fb = conditional(H, direction, pair_b.q);
        a.double_prime.add(0.5 * (fa + fb) - f_base);
      }
    }
    return a;
  });

  Theorem2Result out{};
  out.k = k;
  out.t = t;
  out.eps = eps;
  out.n_samples = n;
  out.f_base = acc.base.mean;
  out.f_base_std_error = acc.base.std_error();
  if (has_prime) out.prime = summarize(acc.prime, eps);
  if (has_double_prime) out.double_prime = summarize(acc.double_prime, eps);

  bool rejected = false;
  bool all_within_noise = true;
  for (const auto& d : {out.prime, out.double_prime}) {
    if (!d) continue;
    rejected = rejected || d->decrease_detected;
    all_within_noise = all_within_noise && std::abs(d->delta) <= 3.0 * d->std_error;
  }
  out.status = rejected ? PatternStatus::rejected
                        : (all_within_noise ? PatternStatus::inconclusive : PatternStatus::not_rejected);
  return out;
}

std::string_view to_string(PatternStatus s) {
  switch (s) {
    case PatternStatus::rejected: return "rejected";
    case PatternStatus::not_rejected: return "not_rejected";
    case PatternStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace outage
