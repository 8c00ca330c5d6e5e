#include "outage/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace outage {

double ChannelSpec::u() const { return std::expm1(rate); }

double ChannelSpec::det_threshold() const { return std::exp(rate); }

void ChannelSpec::validate() const {
  if (t < 1 || r < 1) throw std::invalid_argument("antenna counts t and r must be >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rate R must be a finite value > 0");
  if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("power P must be a finite value > 0");
}

ChannelSpec ChannelSpec::timo(int r, double rate, double power) {
  ChannelSpec spec{2, r, rate, power};
  spec.validate();
  return spec;
}

void PowerSplit::validate(const ChannelSpec& spec) const {
  if (!(q1 >= 0.0) || !(q2 >= 0.0)) throw std::invalid_argument("powers q1, q2 must be >= 0");
  if (std::abs(q1 + q2 - spec.power) > 1e-12) {
    throw std::invalid_argument("q1 + q2 must equal the total power P");
  }
}

PowerSplit PowerSplit::along(double q1, const ChannelSpec& spec) {
  if (!(q1 >= 0.0) || !(q1 <= spec.power)) throw std::invalid_argument("q1 must lie in [0, P]");
  return {q1, spec.power - q1};
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::mc_direct: return "mc-direct";
    case Method::mc_reduced: return "mc-reduced";
    case Method::mc_special_q: return "mc-special-q";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "quadrature") return Method::quadrature;
  if (s == "mc-direct") return Method::mc_direct;
  if (s == "mc-reduced") return Method::mc_reduced;
  if (s == "mc-special-q") return Method::mc_special_q;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::conjecture_holds: return "conjecture_holds";
    case Verdict::counterexample: return "counterexample";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::numerically_unstable: return "numerically_unstable";
  }
  return "?";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "conjecture_holds") return Verdict::conjecture_holds;
  if (s == "counterexample") return Verdict::counterexample;
  if (s == "inconclusive") return Verdict::inconclusive;
  if (s == "numerically_unstable") return Verdict::numerically_unstable;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

}  // namespace outage
