#pragma once

// Shared plumbing: error taxonomy, deterministic RNG, low-discrepancy
// sequences, and a static-partition parallel map whose result order is
// independent of the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace systole {

inline constexpr const char* kVersion = "1.0.0";

// Invalid arguments or malformed inputs (dimension mismatches, bad
// parameters, non-involutions, open loops, ...).
struct ConstructionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation started from valid inputs failed to produce a result
// (no convergence, step underflow, non-finite values, empty search).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mathematical invariant that should hold was measurably violated.
struct PropertyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// SplitMix64: tiny, seedable, and bit-identical on every platform.
// std::uniform_real_distribution is implementation-defined, so all
// randomness in reports flows through this generator instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Standard normal via Box-Muller (deterministic, unlike std::normal_*).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do { u = u01(); } while (u <= 0.0);
    const double v = u01();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(6.283185307179586476925286766559 * v);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925286766559 * v);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Halton radical inverse in the given prime base; index is 1-based.
inline double halton(std::uint64_t index, std::uint32_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

inline std::uint32_t nth_prime(int i) {
  static constexpr std::uint32_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                             23, 29, 31, 37, 41, 43, 47, 53};
  if (i < 0 || i >= static_cast<int>(sizeof(primes) / sizeof(primes[0])))
    throw ConstructionError("nth_prime: dimension too large for Halton table");
  return primes[i];
}

// Maps [0,1) to a standard normal quantile (Acklam's rational
// approximation, |relative error| < 1.2e-9; ample for seed scattering).
double normal_quantile(double p);

// Runs fn(i) for i in [0, count) across `jobs` threads with a static
// block partition; results land at their own index, so the output is
// identical for every job count.
template <typename T>
std::vector<T> parallel_map(int count, int jobs,
                            const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return out;
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::future<void>> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  std::atomic<int> cursor{0};
  for (int w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&]() {
      for (;;) {
        const int i = cursor.fetch_add(1);
        if (i >= count) return;
        out[static_cast<std::size_t>(i)] = fn(i);
      }
    }));
  }
  for (auto& f : workers) f.get();
  return out;
}

}  // namespace systole
