#pragma once

#include <string>
#include <vector>

#include "outage/sweep.hpp"

namespace outage {

struct CurvePoint {
  double q1;
  double value;
  double uncertainty;  // drawn as an error bar for Monte Carlo points
};

struct CurveData {
  std::string title;
  std::string note;  // written to <desc>, e.g. the Monte Carlo sample size
  std::vector<CurvePoint> quadrature;   // joined as a polyline
  std::vector<CurvePoint> monte_carlo;  // markers with +-3 standard error bars
};

/// Outage probability against q1. Output is self-contained SVG 1.1 and depends
/// only on the input values.
std::string render_curve_svg(const CurveData& data);

/// (R, P) verdict scatter: counterexample cells as large red dots, conjecture
/// cells as small blue dots, other verdicts as grey or orange rings.
std::string render_map_svg(const std::vector<SweepRecord>& records, const std::string& title);

}  // namespace outage
