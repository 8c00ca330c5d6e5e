#pragma once

#include <atomic>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "outage/channel.hpp"
#include "outage/quadrature.hpp"

namespace outage {

/// start:stop:step, inclusive of stop up to rounding.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  void validate() const;
  /// Grid values, each multiplied by `scale`.
  std::vector<double> values(double scale = 1.0) const;
  static Range parse(std::string_view text);
};

/// (R, P) grid for t = 2. Rate and power ranges are multiples of r.
struct SweepGrid {
  int r = 2;
  Range rate;
  Range power;
  double q_step = 0.025;  // fraction of P

  void validate() const;
  int q_points() const;
};

struct SweepRecord {
  int r = 2;
  double rate = 0.0;
  double power = 0.0;
  double q_star = 0.0;
  double f_star = 0.0;
  double f_at_zero = 0.0;
  double f_at_half = 0.0;
  double err_bound = 0.0;
  Verdict verdict = Verdict::conjecture_holds;

  bool operator==(const SweepRecord&) const = default;
};

/// Cells whose outage exceeds this at every grid point are numerically unstable.
inline constexpr double kUnstableOutage = 1.0 - 1e-6;
/// A counterexample needs f_star below both conjectured values by this many error bounds.
inline constexpr double kVerdictMarginFactor = 10.0;

/// Minimizes over q1 and classifies one (R, P) cell.
SweepRecord evaluate_cell(int r, double rate, double power, double q_step, const QuadratureSpec& quad = {});

/// Receives each completed rate row (all P values for one R) in output order.
using SweepSink = std::function<void(std::span<const SweepRecord>)>;

/// Evaluates every cell, R-major then P. jobs <= 1 runs the serial reference
/// loop; otherwise cells are shared among `jobs` OpenMP threads. The result
/// does not depend on jobs. When `stop` becomes true the sweep returns after
/// the current rate row.
std::vector<SweepRecord> run_sweep(const SweepGrid& grid, const QuadratureSpec& quad = {}, int jobs = 1,
                                   const SweepSink& sink = {}, const std::atomic<bool>* stop = nullptr);

}  // namespace outage
