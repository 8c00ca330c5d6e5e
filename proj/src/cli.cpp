#include "outage/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "outage/csv.hpp"
#include "outage/mcsim.hpp"
#include "outage/mimo_general.hpp"
#include "outage/sweep.hpp"
#include "outage/svg.hpp"
#include "outage/timo.hpp"

namespace outage {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  int r = 2;
  int t = 2;
  int k = 2;
  int theorem = 1;
  double rate = 0.0;
  double power = 0.0;
  double q1 = 0.0;
  std::string method = "quadrature";
  double n = 1e6;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  double tau = kDefaultSignTolerance;
  std::optional<double> eps;
  int jobs = 0;
  bool bits = false;
  std::string rate_range;
  std::string power_range;
  double q_step = 0.025;
  std::string out;
  std::string in;
  std::string kind = "curve";
  int points = 41;
  int mc_every = 4;

  CLI::Option* rate_opt = nullptr;
  CLI::Option* power_opt = nullptr;
  CLI::Option* q1_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  double rate_nats() const { return bits ? rate * std::numbers::ln2 : rate; }

  void require(const CLI::Option* opt, const char* name) const {
    if (opt->count() == 0) throw UsageError(std::string("missing required flag ") + name);
  }

  ChannelSpec channel() const {
    require(rate_opt, "--R");
    require(power_opt, "--P");
    ChannelSpec spec{t, r, rate_nats(), power};
    spec.validate();
    return spec;
  }

  std::uint64_t samples() const {
    if (!(n >= 1.0) || n > 9007199254740992.0 || n != std::floor(n)) {
      throw UsageError("--n must be a positive integer");
    }
    return static_cast<std::uint64_t>(n);
  }

  QuadratureSpec quad() const { return quadrature_from_tolerance(tol); }

  int worker_count() const {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
};

CsvRow base_row(const ChannelSpec& spec, std::string method) {
  CsvRow row;
  row.method = std::move(method);
  row.t = spec.t;
  row.r = spec.r;
  row.rate = spec.rate;
  row.power = spec.power;
  return row;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open output file " + path);
  return file;
}

// ---------------------------------------------------------------- outage

int cmd_outage(const Options& o, std::ostream& out) {
  const ChannelSpec spec = o.channel();
  o.require(o.q1_opt, "--q1");
  const Method method = method_from_string(o.method);

  CsvRow row = base_row(spec, std::string(to_string(method)));
  OutageEstimate est;
  const RandomStream stream{o.seed, 0};
  switch (method) {
    case Method::quadrature: {
      if (spec.t != 2) throw UsageError("quadrature needs --t 2");
      const auto split = PowerSplit::along(o.q1, spec);
      split.validate(spec);
      est = outage_timo(split, spec, o.quad());
      row.q1 = split.q1;
      row.q2 = split.q2;
      break;
    }
    case Method::mc_reduced: {
      if (spec.t != 2) throw UsageError("mc-reduced needs --t 2");
      const auto split = PowerSplit::along(o.q1, spec);
      split.validate(spec);
      est = mc_outage_timo_reduced(split, spec, o.samples(), stream);
      row.q1 = split.q1;
      row.q2 = split.q2;
      break;
    }
    case Method::mc_direct: {
      // (q1, P - q1) on the first two transmitters, the rest silent.
      const auto split = PowerSplit::along(o.q1, spec);
      ChannelSpec two = spec;
      two.t = 2;
      split.validate(two);
      std::vector<double> q(spec.t, 0.0);
      q[0] = split.q1;
      q[1] = split.q2;
      est = mc_outage_direct(q, spec, o.samples(), stream);
      row.q1 = split.q1;
      row.q2 = split.q2;
      break;
    }
    case Method::mc_special_q: {
      // k - 2 entries at P/k; the deviant pair is (q1, 2P/k - q1).
      const double q0 = spec.power / o.k;
      const SpecialQ sq{q0, o.q1, 2.0 * q0 - o.q1, o.k, spec.t};
      sq.validate(spec);
      est = mc_outage_special_q(sq, spec, o.samples(), stream);
      row.q1 = sq.qa;
      row.q2 = sq.qb;
      break;
    }
  }
  row.value = est.value;
  row.uncertainty = est.uncertainty;
  if (method != Method::quadrature) {
    row.n_samples = est.n_samples;
    row.seed = o.seed;
  }
  if (est.evaluation_errors > 0) {
    out << "# " << est.evaluation_errors << " draws failed to factorize and were excluded\n";
  }
  write_csv(out, {row});
  return kExitOk;
}

// ---------------------------------------------------------------- derivatives

struct FiniteDifference {
  double d1;
  double d2;
};

// Reference derivatives of q1 -> f(q1, P - q1) from tightly converged values:
// one-sided second-order stencils at q1 = 0, central ones elsewhere.
FiniteDifference finite_difference(double q1, const ChannelSpec& spec) {
  const QuadratureSpec tight{1e-13, 1e-12, 4000};
  auto f = [&](double x) { return outage_timo(PowerSplit::along(x, spec), spec, tight).value; };
  const double h = 1e-2 * spec.power;
  if (q1 - 3.0 * h < 0.0) {
    const double f0 = f(q1), f1 = f(q1 + h), f2 = f(q1 + 2 * h), f3 = f(q1 + 3 * h);
    return {(-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h), (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h)};
  }
  const double fm = f(q1 - h), f0 = f(q1), fp = f(q1 + h);
  return {(fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)};
}

int cmd_derivatives(const Options& o, std::ostream& out) {
  ChannelSpec spec = o.channel();
  if (spec.t != 2) throw UsageError("derivatives need --t 2");
  const auto quad = o.quad();

  std::vector<CsvRow> rows;
  auto emit = [&](const char* name, double q1, double value, double reference) {
    CsvRow row = base_row(spec, "quadrature");
    row.q1 = q1;
    row.q2 = spec.power - q1;
    row.value = value;
    row.quantity = name;
    row.reference = reference;
    rows.push_back(row);
  };

  if (o.q1_opt->count() > 0) {
    if (!(o.q1 >= 0.0 && o.q1 <= spec.power)) throw UsageError("--q1 must lie in [0, P]");
    const auto fd = finite_difference(std::min(o.q1, spec.power - o.q1), spec);
    // d1 changes sign under the mirror q1 -> P - q1, d2 does not.
    const double mirror = o.q1 > 0.5 * spec.power ? -1.0 : 1.0;
    emit("d1", o.q1, total_first_derivative(o.q1, spec, quad), mirror * fd.d1);
    emit("d2", o.q1, total_second_derivative(o.q1, spec, quad), fd.d2);
  } else {
    const auto rep = derivative_report(spec, quad);
    const auto fd_zero = finite_difference(0.0, spec);
    const auto fd_half = finite_difference(0.5 * spec.power, spec);
    emit("d1_at_zero", 0.0, rep.d1_at_zero, fd_zero.d1);
    emit("d2_at_zero", 0.0, rep.d2_at_zero, fd_zero.d2);
    emit("d1_at_half", 0.5 * spec.power, rep.d1_at_half, fd_half.d1);
    emit("d2_at_half", 0.5 * spec.power, rep.d2_at_half, fd_half.d2);
  }
  write_csv(out, rows);
  return kExitOk;
}

// ---------------------------------------------------------------- check

int check_theorem1(const Options& o, std::ostream& out) {
  const ChannelSpec spec = o.channel();
  if (spec.t != 2) throw UsageError("theorem 1 applies to --t 2");
  const auto v = theorem1_check(spec, o.quad(), o.tau);

  out << "# theorem 1 derivative test, r=" << spec.r << " R=" << format_double(spec.rate)
      << " P=" << format_double(spec.power) << "\n";
  out << "# d1 at q1=0: " << format_double(v.d1_at_zero) << "\n";
  if (std::isfinite(v.d2_at_zero)) out << "# d2 at q1=0: " << format_double(v.d2_at_zero) << "\n";
  out << "# d1 at q1=P/2: " << format_double(v.d1_at_half) << " (symmetry)\n";
  out << "# d2 at q1=P/2: " << format_double(v.d2_at_half) << "\n";
  out << "# sign tolerance: " << format_double(v.tolerance) << "\n";
  out << "# verdict: " << to_string(v.verdict) << "\n";

  std::vector<CsvRow> rows;
  auto emit = [&](const char* name, double q1, double value) {
    CsvRow row = base_row(spec, "quadrature");
    row.q1 = q1;
    row.q2 = spec.power - q1;
    row.value = std::isfinite(value) ? std::optional<double>(value) : std::nullopt;
    row.uncertainty = v.tolerance;
    row.verdict = std::string(to_string(v.verdict));
    row.quantity = name;
    rows.push_back(row);
  };
  emit("d1_at_zero", 0.0, v.d1_at_zero);
  emit("d2_at_zero", 0.0, v.d2_at_zero);
  emit("d1_at_half", 0.5 * spec.power, v.d1_at_half);
  emit("d2_at_half", 0.5 * spec.power, v.d2_at_half);
  write_csv(out, rows);
  return kExitOk;
}

int check_theorem2(const Options& o, std::ostream& out) {
  const ChannelSpec spec = o.channel();
  const double eps = o.eps ? *o.eps : default_theorem2_eps(o.k, spec);
  const auto res = theorem2_check(o.k, spec, eps, o.samples(), RandomStream{o.seed, 0});

  out << "# theorem 2 paired test of the uniform pattern, k=" << res.k << " t=" << res.t << " r=" << spec.r
      << " R=" << format_double(spec.rate) << " P=" << format_double(spec.power) << "\n";
  out << "# eps=" << format_double(res.eps) << " n=" << res.n_samples << " seed=" << o.seed << "\n";
  out << "# f(uniform) = " << format_double(res.f_base) << " +- " << format_double(res.f_base_std_error) << "\n";
  auto describe = [&](const char* label, const PairedDifference& d) {
    out << "# " << label << ": delta=" << format_double(d.delta) << " se=" << format_double(d.std_error)
        << " delta/eps^2=" << format_double(d.second_order)
        << (d.decrease_detected ? " (decrease below -3 se)" : "") << "\n";
  };
  if (res.prime) describe("move eps to an idle transmitter", *res.prime);
  if (res.double_prime) {
    describe("move eps between active transmitters", *res.double_prime);
    // delta'' ~ (eps^2 / 2) (d2f/dqi2 - d2f/dqidqj): both readings of the condition's sign.
    const double c = 2.0 * res.double_prime->second_order;
    out << "# implied d2f/dqi2 - d2f/dqidqj = " << format_double(c) << "; read as '> 0 rejects': "
        << (c > 0 ? "rejects" : "does not reject") << "; read as '< 0 rejects': "
        << (c < 0 ? "rejects" : "does not reject") << "\n";
  }
  out << "# status: " << to_string(res.status) << "\n";

  const std::string status(to_string(res.status));
  std::vector<CsvRow> rows;
  auto emit = [&](const char* name, double value, double se) {
    CsvRow row = base_row(spec, "mc-paired");
    row.value = value;
    row.uncertainty = se;
    row.n_samples = res.n_samples;
    row.seed = o.seed;
    row.verdict = status;
    row.quantity = name;
    rows.push_back(row);
  };
  emit("f_uniform", res.f_base, res.f_base_std_error);
  if (res.prime) {
    emit("delta_prime", res.prime->delta, res.prime->std_error);
    emit("delta_prime_over_eps2", res.prime->second_order, res.prime->std_error / (eps * eps));
  }
  if (res.double_prime) {
    emit("delta_double_prime", res.double_prime->delta, res.double_prime->std_error);
    emit("delta_double_prime_over_eps2", res.double_prime->second_order, res.double_prime->std_error / (eps * eps));
  }
  write_csv(out, rows);
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  if (o.theorem == 1) return check_theorem1(o, out);
  if (o.theorem == 2) return check_theorem2(o, out);
  throw UsageError("--theorem must be 1 or 2");
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.rate_range.empty() || o.power_range.empty()) throw UsageError("sweep needs --R-range and --P-range");
  SweepGrid grid{o.r, Range::parse(o.rate_range), Range::parse(o.power_range), o.q_step};
  if (o.bits) {
    grid.rate.start *= std::numbers::ln2;
    grid.rate.stop *= std::numbers::ln2;
    grid.rate.step *= std::numbers::ln2;
  }
  grid.validate();
  const auto quad = o.quad();

  std::ofstream file;
  std::ostream& os = open_output(o.out, file, out);
  os << csv_header() << '\n';
  os.flush();
  std::size_t written = 0;
  auto sink = [&](std::span<const SweepRecord> batch) {
    for (const auto& rec : batch) os << format_row(to_csv_row(rec, o.seed)) << '\n';
    os.flush();
    written += batch.size();
  };
  auto& stop = interrupt_flag();
  run_sweep(grid, quad, o.worker_count(), sink, &stop);
  if (stop.load()) {
    err << "interrupted: " << written << " cells written\n";
    return kExitInterrupted;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- plot

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_plot(const Options& o, std::ostream& out) {
  std::string svg;
  if (o.kind == "map") {
    if (o.in.empty()) throw UsageError("map plots need --in");
    std::istringstream in(read_file(o.in));
    std::vector<SweepRecord> records;
    for (const auto& row : read_csv(in)) records.push_back(sweep_record_from_row(row));
    std::string title = "Verdicts";
    if (!records.empty()) title += " (r = " + std::to_string(records.front().r) + ")";
    svg = render_map_svg(records, title);
  } else if (o.kind == "curve") {
    CurveData data;
    if (!o.in.empty()) {
      std::istringstream in(read_file(o.in));
      for (const auto& row : read_csv(in)) {
        if (!row.q1 || !row.value) continue;
        const CurvePoint p{*row.q1, *row.value, row.uncertainty.value_or(0.0)};
        (row.method == "quadrature" ? data.quadrature : data.monte_carlo).push_back(p);
      }
      data.title = "Outage probability";
    } else {
      const ChannelSpec spec = o.channel();
      if (spec.t != 2) throw UsageError("curve plots need --t 2");
      if (o.points < 2) throw UsageError("--points must be >= 2");
      if (o.mc_every < 1) throw UsageError("--mc-every must be >= 1");
      const std::uint64_t n = o.n == 0.0 ? 0 : o.samples();
      data = curve_data(spec, o.points, n, o.mc_every, RandomStream{o.seed, 0}, o.quad());
    }
    svg = render_curve_svg(data);
  } else {
    throw UsageError("--kind must be curve or map");
  }
  std::ofstream file;
  open_output(o.out, file, out) << svg;
  return kExitOk;
}

void add_flags(CLI::App& app, Options& o) {
  app.add_option("--r", o.r, "receive antennas")->capture_default_str();
  app.add_option("--t", o.t, "transmit antennas")->capture_default_str();
  o.rate_opt = app.add_option("--R", o.rate, "target rate (nats unless --bits)");
  o.power_opt = app.add_option("--P", o.power, "total transmit power");
  o.q1_opt = app.add_option("--q1", o.q1, "power on transmitter 1");
  app.add_option("--method", o.method, "quadrature | mc-direct | mc-reduced | mc-special-q")->capture_default_str();
  o.n_opt = app.add_option("--n", o.n, "Monte Carlo draws")->capture_default_str();
  o.seed_opt = app.add_option("--seed", o.seed, "random seed")->envname("OUTAGE_LAB_SEED")->capture_default_str();
  app.add_option("--tol", o.tol, "quadrature relative tolerance")->capture_default_str();
  app.add_option("--tau", o.tau, "sign-decision tolerance for derivative tests")->capture_default_str();
  app.add_option("--jobs", o.jobs, "worker threads (0: all cores)")->capture_default_str();
  app.add_flag("--bits", o.bits, "rates are given in bits");
  app.add_option("--theorem", o.theorem, "1 (t = 2 derivative test) or 2 (uniform pattern test)")
      ->capture_default_str();
  app.add_option("--k", o.k, "active transmitters")->capture_default_str();
  app.add_option("--eps", o.eps, "perturbation size for the theorem 2 test (default 0.025 P/k)");
  app.add_option("--R-range", o.rate_range, "start:stop:step in multiples of r");
  app.add_option("--P-range", o.power_range, "start:stop:step in multiples of r");
  app.add_option("--q-step", o.q_step, "q1 grid step as a fraction of P")->capture_default_str();
  app.add_option("--out", o.out, "output file (default: standard output)");
  app.add_option("--in", o.in, "input CSV");
  app.add_option("--kind", o.kind, "curve | map")->capture_default_str();
  app.add_option("--points", o.points, "q1 points on a curve")->capture_default_str();
  app.add_option("--mc-every", o.mc_every, "Monte Carlo point at every n-th curve point")->capture_default_str();
}

}  // namespace

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

QuadratureSpec quadrature_from_tolerance(double tol) {
  if (!(tol > 0.0) || !(tol < 1.0)) throw std::invalid_argument("tolerance must lie in (0, 1)");
  QuadratureSpec q;
  q.rel_tol = tol;
  q.abs_tol = tol * 1e-2;
  return q;
}

CurveData curve_data(const ChannelSpec& spec, int points, std::uint64_t n, int mc_every, const RandomStream& stream,
                     const QuadratureSpec& quad) {
  if (points < 2) throw std::invalid_argument("a curve needs at least two points");
  if (mc_every < 1) throw std::invalid_argument("mc_every must be >= 1");
  CurveData data;
  data.title = "Outage probability vs q1 (r = " + std::to_string(spec.r) + ", R = " + format_double(spec.rate) +
               ", P = " + format_double(spec.power) + ")";
  data.note = "quadrature rel_tol " + format_double(quad.rel_tol) + "; Monte Carlo: reduced model, n = " +
              std::to_string(n) + " per point, seed " + std::to_string(stream.seed) + ", " + kGeneratorName;
  for (int i = 0; i < points; ++i) {
    const double q1 = spec.power * i / (points - 1);
    const auto split = PowerSplit::along(q1, spec);
    const int mirror = points - 1 - i;
    if (mirror < i) {
      data.quadrature.push_back({q1, data.quadrature[mirror].value, data.quadrature[mirror].uncertainty});
    } else {
      const auto f = outage_timo(split, spec, quad);
      data.quadrature.push_back({q1, f.value, f.uncertainty});
    }
    if (n > 0 && i % mc_every == 0) {
      const auto mc = mc_outage_timo_reduced(split, spec, n, stream.with_stream(static_cast<std::uint64_t>(i)));
      data.monte_carlo.push_back({q1, mc.value, mc.uncertainty});
    }
  }
  return data;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outage probability of MIMO Gaussian channels: evaluation, derivative tests and sweeps",
               "outage-lab"};
  app.set_config("--config", "", "TOML/INI file of flat flag = value keys; flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options o;
  add_flags(app, o);
  auto* outage = app.add_subcommand("outage", "outage probability at one power split");
  auto* derivatives = app.add_subcommand("derivatives", "first and second derivatives along the trace constraint");
  auto* check = app.add_subcommand("check", "conjecture checks (--theorem 1 or 2)");
  auto* sweep = app.add_subcommand("sweep", "(R, P) grid of minimizations, written as CSV");
  auto* plot = app.add_subcommand("plot", "SVG curve or verdict map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (outage->parsed()) return cmd_outage(o, out);
    if (derivatives->parsed()) return cmd_derivatives(o, out);
    if (check->parsed()) return cmd_check(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (plot->parsed()) return cmd_plot(o, out);
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace outage
