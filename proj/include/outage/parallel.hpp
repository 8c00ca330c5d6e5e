#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "outage/random.hpp"

namespace outage {

enum class Execution { serial, parallel };

/// Draws per chunk. Chunk c always consumes substream c of the caller's
/// RandomStream, so the partition does not depend on the thread count.
inline constexpr std::uint64_t kChunkSize = 1u << 14;

/// Hit counter for indicator estimators.
struct Tally {
  std::uint64_t hits = 0;
  std::uint64_t draws = 0;
  std::uint64_t errors = 0;

  void merge(const Tally& o) {
    hits += o.hits;
    draws += o.draws;
    errors += o.errors;
  }
};

/// Running mean and centred second moment (Chan et al. pairwise merge).
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / n;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

/// Runs kernel(engine, draws) once per chunk and merges the per-chunk
/// accumulators in chunk order. The serial path is the reference; the OpenMP
/// path returns bit-identical results. Kernels must not throw.
template <typename Acc, typename Kernel>
Acc run_chunked(std::uint64_t n, const RandomStream& stream, Execution exec, Kernel&& kernel) {
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Acc> parts(chunks);
  auto body = [&](std::uint64_t c) {
    auto engine = stream.engine(c);
    const std::uint64_t count = std::min(kChunkSize, n - c * kChunkSize);
    parts[c] = kernel(engine, count);
  };
  if (exec == Execution::parallel) {
    const auto total = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < total; ++c) body(static_cast<std::uint64_t>(c));
  } else {
    for (std::uint64_t c = 0; c < chunks; ++c) body(c);
  }
  Acc merged{};
  for (const auto& p : parts) merged.merge(p);
  return merged;
}

}  // namespace outage
