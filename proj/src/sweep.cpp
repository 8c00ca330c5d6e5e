#include "outage/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "outage/timo.hpp"

namespace outage {

namespace {

double parse_number(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void Range::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw std::invalid_argument("range bounds must be finite");
  }
  if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
  if (!(start <= stop)) throw std::invalid_argument("range start must be <= stop");
}

std::vector<double> Range::values(double scale) const {
  validate();
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) out.push_back(scale * (start + step * static_cast<double>(i)));
  return out;
}

Range Range::parse(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
    throw std::invalid_argument("range must look like start:stop:step, got '" + std::string(text) + "'");
  }
  Range r{parse_number(text.substr(0, first)), parse_number(text.substr(first + 1, second - first - 1)),
          parse_number(text.substr(second + 1))};
  r.validate();
  return r;
}

void SweepGrid::validate() const {
  if (r < 1) throw std::invalid_argument("receiver count r must be >= 1");
  rate.validate();
  power.validate();
  if (!(rate.start > 0.0) || !(power.start > 0.0)) throw std::invalid_argument("R and P must be > 0");
  if (!(q_step > 0.0) || !(q_step <= 0.25)) throw std::invalid_argument("q step must lie in (0, 0.25]");
}

int SweepGrid::q_points() const { return static_cast<int>(std::ceil(0.5 / q_step - 1e-9)) + 1; }

SweepRecord evaluate_cell(int r, double rate, double power, double q_step, const QuadratureSpec& quad) {
  SweepRecord rec;
  rec.r = r;
  rec.rate = rate;
  rec.power = power;
  const auto spec = ChannelSpec::timo(r, rate, power);
  const SweepGrid shape{r, {}, {}, q_step};

  MinSplit m;
  try {
    m = find_min_split(spec, shape.q_points(), quad);
  } catch (const std::exception&) {
    // Convergence failures and non-finite integrands mark the cell, not the sweep.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.q_star = rec.f_star = rec.f_at_zero = rec.f_at_half = rec.err_bound = nan;
    rec.verdict = Verdict::numerically_unstable;
    return rec;
  }
  rec.q_star = m.q_star;
  rec.f_star = m.f_star;
  rec.f_at_zero = m.f_at_zero;
  rec.f_at_half = m.f_at_half;
  rec.err_bound = m.err_bound;

  const bool saturated =
      std::all_of(m.grid_f.begin(), m.grid_f.end(), [](double f) { return f > kUnstableOutage; });
  const double conjectured = std::min(m.f_at_zero, m.f_at_half);
  const double resolution = 1e-4 * power;
  const bool interior = m.q_star >= resolution && 0.5 * power - m.q_star >= resolution;

  if (saturated) {
    rec.verdict = Verdict::numerically_unstable;
  } else if (interior && m.f_star < conjectured - kVerdictMarginFactor * m.err_bound) {
    rec.verdict = Verdict::counterexample;
  } else if (interior && m.f_star < conjectured) {
    rec.verdict = Verdict::inconclusive;
  } else {
    rec.verdict = Verdict::conjecture_holds;
  }
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepGrid& grid, const QuadratureSpec& quad, int jobs,
                                   const SweepSink& sink, const std::atomic<bool>* stop) {
  grid.validate();
  quad.validate();
  const auto rates = grid.rate.values(grid.r);
  const auto powers = grid.power.values(grid.r);
  const auto row = static_cast<std::int64_t>(powers.size());

  std::vector<SweepRecord> out;
  out.reserve(rates.size() * powers.size());
  std::vector<SweepRecord> batch(powers.size());
  for (double rate : rates) {
    if (stop != nullptr && stop->load()) break;
    auto cell = [&](std::int64_t j) { batch[j] = evaluate_cell(grid.r, rate, powers[j], grid.q_step, quad); };
    if (jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
      for (std::int64_t j = 0; j < row; ++j) cell(j);
    } else {
      for (std::int64_t j = 0; j < row; ++j) cell(j);
    }
    out.insert(out.end(), batch.begin(), batch.end());
    if (sink) sink(batch);
  }
  return out;
}

}  // namespace outage
