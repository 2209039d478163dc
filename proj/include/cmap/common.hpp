#pragma once

// Shared plumbing: typed errors, the worker pool honoring CMAP_THREADS,
// and a few numeric helpers used across modules.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cmap {

enum class errc {
  invalid_argument,
  boundary_data_outside_target,
  degenerate_point,
  outside_tubular_neighborhood,
  not_on_boundary,
  grid_too_small,
  grid_mismatch,
  negative_source,
  empty_set,
  not_free_boundary_point,
  insufficient_nodes,
  invalid_conic,
  branch_cut,
  path_blocked,
  quadrature_too_coarse,
  hypothesis_violated,
  empty_scale_window,
  config_parse,
  io_error,
};

struct Error : std::runtime_error {
  errc code;
  Error(errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw Error(c, what); }

/// Stable machine-readable identifier; used in CLI error reports.
inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::boundary_data_outside_target: return "boundary_data_outside_target";
    case errc::degenerate_point: return "degenerate_point";
    case errc::outside_tubular_neighborhood: return "outside_tubular_neighborhood";
    case errc::not_on_boundary: return "not_on_boundary";
    case errc::grid_too_small: return "grid_too_small";
    case errc::grid_mismatch: return "grid_mismatch";
    case errc::negative_source: return "negative_source";
    case errc::empty_set: return "empty_set";
    case errc::not_free_boundary_point: return "not_free_boundary_point";
    case errc::insufficient_nodes: return "insufficient_nodes";
    case errc::invalid_conic: return "invalid_conic";
    case errc::branch_cut: return "branch_cut";
    case errc::path_blocked: return "path_blocked";
    case errc::quadrature_too_coarse: return "quadrature_too_coarse";
    case errc::hypothesis_violated: return "hypothesis_violated";
    case errc::empty_scale_window: return "empty_scale_window";
    case errc::config_parse: return "config_parse";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

inline constexpr double nan64 = std::numeric_limits<double>::quiet_NaN();
inline constexpr double inf64 = std::numeric_limits<double>::infinity();

inline bool nearly_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double sqr(double x) { return x * x; }

/// Worker count: min(hardware, CMAP_THREADS if set). At least 1.
inline int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("CMAP_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && cap < 1024) hw = std::min(hw, static_cast<int>(cap));
  }
  return hw;
}

/// Runs fn(begin, end) over a fixed chunking of [0, n). The chunk partition is
/// independent of the thread count, so chunk-local results combined in chunk
/// order give bit-identical reductions on any machine.
inline void parallel_chunks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t nchunks = std::min<std::size_t>(64, n);
  const int nthreads = std::min<int>(worker_count(), static_cast<int>(nchunks));
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) {
      std::size_t b = n * c / nchunks, e = n * (c + 1) / nchunks;
      fn(b, e, c);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  std::vector<std::size_t> next(1, 0);
  // Static round-robin assignment keeps the schedule deterministic.
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t c = static_cast<std::size_t>(t); c < nchunks;
           c += static_cast<std::size_t>(nthreads)) {
        std::size_t b = n * c / nchunks, e = n * (c + 1) / nchunks;
        fn(b, e, c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

/// xorshift-based deterministic generator for sampling duties (seeded, portable).
struct SplitMix64 {
  std::uint64_t s;
  explicit SplitMix64(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

}  // namespace cmap
