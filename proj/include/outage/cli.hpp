#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>

#include "outage/channel.hpp"
#include "outage/quadrature.hpp"
#include "outage/random.hpp"
#include "outage/svg.hpp"

namespace outage {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitInterrupted = 130;

/// Set from a signal handler to stop a running sweep after the current row.
std::atomic<bool>& interrupt_flag();

/// --tol T maps to rel_tol = T, abs_tol = T / 100.
QuadratureSpec quadrature_from_tolerance(double tol);

/// f(q1, P - q1) on `points` equally spaced q1 in [0, P], plus Monte Carlo
/// points (reduced model, n draws each) at every `mc_every`-th q1 when n > 0.
/// Values for q1 > P/2 are copied from the mirror point, so the curve is exactly symmetric.
CurveData curve_data(const ChannelSpec& spec, int points, std::uint64_t n, int mc_every, const RandomStream& stream,
                     const QuadratureSpec& quad = {});

/// Entry point behind the outage-lab executable; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace outage
