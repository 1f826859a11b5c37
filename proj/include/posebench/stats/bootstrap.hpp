#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "posebench/error.hpp"
#include "posebench/stats/best_at_k.hpp"

namespace posebench::stats {

// SplitMix64 (Steele, Lea, Flood 2014). A bootstrap iteration draws from
// its own stream whose initial state is mix(seed ^ mix(iteration)), so any
// subset of iterations can be evaluated independently.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 for_iteration(std::uint64_t seed, std::uint64_t iteration) {
    return SplitMix64(mix(seed ^ mix(iteration)));
  }

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform integer in [0, range) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t range) {
    if (range == 0) throw InvalidArgument("below(0)");
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        x = next();
        m = static_cast<unsigned __int128>(x) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

inline constexpr int kDefaultBootstrapIters = 1000;

struct BootstrapResult {
  double mean = 0.0;
  double sem = 0.0;
  std::vector<double> resample_means;
  bool operator==(const BootstrapResult&) const = default;
};

// Mean of one resample: n indices drawn in order from the iteration's
// stream, values summed in draw order.
inline double resample_mean(const std::vector<double>& values, std::uint64_t seed, std::uint64_t iteration) {
  auto rng = SplitMix64::for_iteration(seed, iteration);
  const auto n = static_cast<std::uint64_t>(values.size());
  double s = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) s += values[static_cast<std::size_t>(rng.below(n))];
  return s / static_cast<double>(n);
}

// Mean and population standard deviation of the resample means. Moments are
// taken relative to the first resample mean, so a constant input gives
// exactly zero spread.
inline BootstrapResult summarize_resamples(std::vector<double> means) {
  BootstrapResult r;
  const double shift = means.front();
  double s1 = 0.0, s2 = 0.0;
  for (double m : means) {
    s1 += m - shift;
    s2 += (m - shift) * (m - shift);
  }
  const double n = static_cast<double>(means.size());
  r.mean = shift + s1 / n;
  const double var = s2 / n - (s1 / n) * (s1 / n);
  r.sem = var > 0.0 ? std::sqrt(var) : 0.0;
  r.resample_means = std::move(means);
  return r;
}

// Nonparametric bootstrap over structures. `workers` > 1 splits the
// iterations across threads; each iteration owns its stream and slot, so
// the result does not depend on the worker count.
inline BootstrapResult bootstrap(const std::vector<double>& values, int iters = kDefaultBootstrapIters,
                                 std::uint64_t seed = 0, int workers = 1) {
  if (values.empty()) throw InvalidArgument("bootstrap: no values");
  if (iters < 1) throw InvalidArgument("bootstrap: iters must be at least 1");
  std::vector<double> means(static_cast<std::size_t>(iters));
  auto run = [&](int begin, int end) {
    for (int it = begin; it < end; ++it)
      means[static_cast<std::size_t>(it)] = resample_mean(values, seed, static_cast<std::uint64_t>(it));
  };
  workers = std::max(1, std::min(workers, iters));
  if (workers == 1) {
    run(0, iters);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (iters + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int b = w * chunk, e = std::min(iters, b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
    for (auto& t : pool) t.join();
  }
  return summarize_resamples(std::move(means));
}

// One-sided bootstrap p-value for mean(a - b) > 0: share of resampled mean
// differences that are <= 0.
inline double bootstrap_paired_p(const std::vector<double>& a, const std::vector<double>& b,
                                 int iters = kDefaultBootstrapIters, std::uint64_t seed = 0) {
  if (a.size() != b.size()) throw InvalidArgument("bootstrap_paired_p: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const auto r = bootstrap(d, iters, seed);
  std::size_t le = 0;
  for (double m : r.resample_means) le += m <= 0.0;
  return static_cast<double>(le) / static_cast<double>(r.resample_means.size());
}

}  // namespace posebench::stats
