#include "outage/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace outage {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, ptr);
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo, hi;
  double pixel_lo, pixel_hi;

  double map(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }
};

Axis padded(double lo, double hi, double pixel_lo, double pixel_hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
    return {lo - pad, hi + pad, pixel_lo, pixel_hi};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, pixel_lo, pixel_hi};
}

class Canvas {
 public:
  explicit Canvas(const std::string& title, const std::string& note = {}) {
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(kWidth, 0) +
            "\" height=\"" + fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) +
            "\">\n";
    out_ += "<rect x=\"0\" y=\"0\" width=\"" + fixed(kWidth, 0) + "\" height=\"" + fixed(kHeight, 0) +
            "\" fill=\"white\"/>\n";
    if (!note.empty()) out_ += "<desc>" + escape(note) + "</desc>\n";
    text(kWidth / 2, 24, title, "middle", 16);
  }

  void axes(const Axis& x, const Axis& y, const std::string& x_label, const std::string& y_label) {
    out_ += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    out_ += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" +
            fixed(kWidth - kLeft - kRight) + "\" height=\"" + fixed(kHeight - kTop - kBottom) + "\"/>\n";
    out_ += "</g>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
      const double yv = y.lo + (y.hi - y.lo) * i / 4.0;
      text(x.map(xv), kHeight - kBottom + 18, fixed(xv, 4), "middle", 11);
      text(kLeft - 6, y.map(yv) + 4, fixed(yv, 5), "end", 11);
    }
    text(kWidth / 2, kHeight - 16, x_label, "middle", 13);
    out_ += "<text x=\"18\" y=\"" + fixed(kHeight / 2) + "\" font-family=\"sans-serif\" font-size=\"13\" "
            "text-anchor=\"middle\" transform=\"rotate(-90 18 " + fixed(kHeight / 2) + ")\">" +
            escape(y_label) + "</text>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor, int size) {
    out_ += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" font-family=\"sans-serif\" font-size=\"" +
            std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
  }

  void raw(const std::string& s) { out_ += s; }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  std::string out_;
};

}  // namespace

std::string render_curve_svg(const CurveData& data) {
  if (data.quadrature.empty() && data.monte_carlo.empty()) throw std::invalid_argument("curve has no points");
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& p : data.quadrature) {
    x_lo = std::min(x_lo, p.q1);
    x_hi = std::max(x_hi, p.q1);
    y_lo = std::min(y_lo, p.value);
    y_hi = std::max(y_hi, p.value);
  }
  for (const auto& p : data.monte_carlo) {
    x_lo = std::min(x_lo, p.q1);
    x_hi = std::max(x_hi, p.q1);
    y_lo = std::min(y_lo, p.value - 3.0 * p.uncertainty);
    y_hi = std::max(y_hi, p.value + 3.0 * p.uncertainty);
  }
  const Axis x = padded(x_lo, x_hi, kLeft, kWidth - kRight);
  const Axis y = padded(y_lo, y_hi, kHeight - kBottom, kTop);

  Canvas canvas(data.title, data.note);
  canvas.axes(x, y, "q1", "outage probability");
  if (!data.quadrature.empty()) {
    std::string points;
    for (const auto& p : data.quadrature) points += fixed(x.map(p.q1)) + "," + fixed(y.map(p.value)) + " ";
    points.pop_back();
    canvas.raw("<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"" + points + "\"/>\n");
  }
  if (!data.monte_carlo.empty()) {
    canvas.raw("<g stroke=\"#c0392b\" fill=\"#c0392b\">\n");
    for (const auto& p : data.monte_carlo) {
      const double cx = x.map(p.q1);
      canvas.raw("<line x1=\"" + fixed(cx) + "\" y1=\"" + fixed(y.map(p.value - 3.0 * p.uncertainty)) + "\" x2=\"" +
                 fixed(cx) + "\" y2=\"" + fixed(y.map(p.value + 3.0 * p.uncertainty)) + "\"/>\n");
      canvas.raw("<circle cx=\"" + fixed(cx) + "\" cy=\"" + fixed(y.map(p.value)) + "\" r=\"3\"/>\n");
    }
    canvas.raw("</g>\n");
  }
  canvas.text(kWidth - kRight - 8, kTop + 16, "line: quadrature   dots: Monte Carlo (+-3 se)", "end", 11);
  return canvas.finish();
}

std::string render_map_svg(const std::vector<SweepRecord>& records, const std::string& title) {
  if (records.empty()) throw std::invalid_argument("map has no records");
  double r_lo = INFINITY, r_hi = -INFINITY, p_lo = INFINITY, p_hi = -INFINITY;
  for (const auto& rec : records) {
    r_lo = std::min(r_lo, rec.rate);
    r_hi = std::max(r_hi, rec.rate);
    p_lo = std::min(p_lo, rec.power);
    p_hi = std::max(p_hi, rec.power);
  }
  const Axis x = padded(r_lo, r_hi, kLeft, kWidth - kRight);
  const Axis y = padded(p_lo, p_hi, kHeight - kBottom, kTop);

  Canvas canvas(title);
  canvas.axes(x, y, "R (nats)", "P");
  canvas.raw("<g>\n");
  for (const auto& rec : records) {
    const std::string cx = fixed(x.map(rec.rate));
    const std::string cy = fixed(y.map(rec.power));
    switch (rec.verdict) {
      case Verdict::counterexample:
        canvas.raw("<circle class=\"counterexample\" cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"6\" fill=\"#d62728\"/>\n");
        break;
      case Verdict::conjecture_holds:
        canvas.raw("<circle class=\"conjecture_holds\" cx=\"" + cx + "\" cy=\"" + cy +
                   "\" r=\"2.5\" fill=\"#1f77b4\"/>\n");
        break;
      case Verdict::inconclusive:
        canvas.raw("<circle class=\"inconclusive\" cx=\"" + cx + "\" cy=\"" + cy +
                   "\" r=\"4\" fill=\"none\" stroke=\"#ff7f0e\"/>\n");
        break;
      case Verdict::numerically_unstable:
        break;  // left blank, like a discarded region
    }
  }
  canvas.raw("</g>\n");
  return canvas.finish();
}

}  // namespace outage
