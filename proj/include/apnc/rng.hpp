#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "apnc/common.hpp"

namespace apnc {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

/// Derives an independent stream seed from (base seed, job id, task id).
/// Counter-based so any task's stream is reproducible regardless of how
/// many worker threads execute the job.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t job_id,
                                 std::uint64_t task_id = 0) {
  std::uint64_t h = base + 0x9E3779B97F4A7C15ull;
  h = detail::mix64(h ^ (job_id * 0xD1B54A32D192ED03ull));
  h = detail::mix64(h ^ (task_id * 0x8CB92BA72F3D8DD7ull));
  return h;
}

/// Seeded generator with fully specified output. mt19937_64 raw draws are
/// pinned by the standard; the distributions below are hand-rolled so the
/// same seed gives the same stream on every platform and build.
class TaskRng {
 public:
  explicit TaskRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection sampling, bias-free.
  std::uint64_t uniform_index(std::uint64_t n) {
    require(n > 0, "uniform_index: empty range");
    const std::uint64_t rem = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    if (rem == 0) return engine_() % n;
    const std::uint64_t limit = UINT64_MAX - rem + 1;  // largest multiple of n
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Standard normal via Box-Muller (deterministic, pair-cached).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// First k entries of a seeded uniform permutation of [0, n).
/// With k == n this is a full permutation.
inline std::vector<std::uint32_t> sample_distinct_indices(TaskRng& rng,
                                                          std::uint32_t n,
                                                          std::uint32_t k) {
  require(k <= n, "sample_distinct_indices: k=", k, " exceeds n=", n);
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace apnc
