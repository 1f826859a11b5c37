#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "posebench/error.hpp"

namespace posebench::stats {

namespace detail {

inline constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;

// C(n, k) when it does not exceed 2^53, else nullopt. Each partial product
// C(n-k+i, i) is itself a binomial, so the running value stays integral.
inline std::optional<std::uint64_t> binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (acc > kExactLimit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace detail

// Probability that a uniformly random k-subset of n poses, c of which are
// successes, contains at least one success: 1 - C(n-c, k) / C(n, k).
// Exact integers and a single rounding while C(n, k) <= 2^53; otherwise
// the telescoped product of (n-c-i)/(n-i).
inline double best_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n)
    throw InvalidArgument("best_at_k requires 0 <= c <= n and 1 <= k <= n (got n=" + std::to_string(n) +
                          ", c=" + std::to_string(c) + ", k=" + std::to_string(k) + ")");
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  if (auto total = detail::binomial_exact(n, k)) {
    const auto miss = *detail::binomial_exact(n - c, k);
    return static_cast<double>(*total - miss) / static_cast<double>(*total);
  }
  double miss = 1.0;
  for (int i = 0; i < k; ++i) miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  return 1.0 - miss;
}

// Expected maximum of k values drawn without replacement from `values`:
// sum over ascending order statistics v_(i) * C(i-1, k-1) / C(n, k).
// With 0/1 values this equals best_at_k.
inline double expected_max_at_k(std::vector<double> values, int k) {
  const int n = static_cast<int>(values.size());
  if (n < 1 || k < 1 || k > n) throw InvalidArgument("expected_max_at_k requires 1 <= k <= n");
  std::sort(values.begin(), values.end());
  // w_n = k/n, w_{i-1} = w_i * (i-k)/(i-1).
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  w[static_cast<std::size_t>(n)] = static_cast<double>(k) / n;
  for (int i = n; i > k; --i) w[static_cast<std::size_t>(i - 1)] = w[static_cast<std::size_t>(i)] * (i - k) / (i - 1);
  double acc = 0.0;
  for (int i = k; i <= n; ++i) acc += w[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i - 1)];
  return acc;
}

struct PoseOutcome {
  int seed = 0;
  int sample = 0;
  bool success = false;
  std::optional<double> confidence;
};

struct StructureOutcome {
  std::string entry_id;
  int n = 0;
  int c = 0;
  std::optional<bool> confidence_best_success;
  std::vector<PoseOutcome> per_pose;
};

// Success flag of the highest-confidence pose; ties go to the smallest
// (seed, sample).
inline bool select_max_confidence(const std::vector<PoseOutcome>& poses) {
  if (poses.empty()) throw InvalidArgument("select_max_confidence: no poses");
  const PoseOutcome* best = nullptr;
  for (const auto& p : poses) {
    if (!p.confidence) throw InvalidArgument("select_max_confidence: pose without confidence");
    if (!best || *p.confidence > *best->confidence ||
        (*p.confidence == *best->confidence && std::tie(p.seed, p.sample) < std::tie(best->seed, best->sample)))
      best = &p;
  }
  return best->success;
}

inline bool select_max_confidence(const StructureOutcome& o) { return select_max_confidence(o.per_pose); }

inline StructureOutcome make_outcome(std::string entry_id, std::vector<PoseOutcome> poses) {
  StructureOutcome o;
  o.entry_id = std::move(entry_id);
  o.n = static_cast<int>(poses.size());
  for (const auto& p : poses) o.c += p.success;
  bool all_conf = !poses.empty();
  for (const auto& p : poses) all_conf = all_conf && p.confidence.has_value();
  if (all_conf) o.confidence_best_success = select_max_confidence(poses);
  o.per_pose = std::move(poses);
  return o;
}

// Per-structure best@k values, in input order.
inline std::vector<double> best_at_k_values(const std::vector<StructureOutcome>& outcomes, int k) {
  std::vector<double> v;
  v.reserve(outcomes.size());
  for (const auto& o : outcomes) v.push_back(best_at_k(o.n, o.c, k));
  return v;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw InvalidArgument("mean of empty list");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Mean best@k over structures given (n, c) pairs. When every structure has
// the same n and the common-denominator sum stays below 2^53, the mean is
// formed from exact integers with one rounding; otherwise the per-structure
// values are averaged.
inline double mean_best_at_k(const std::vector<std::pair<int, int>>& counts, int k) {
  if (counts.empty()) throw InvalidArgument("aggregate: no structures");
  const int n = counts.front().first;
  bool same_n = true;
  for (const auto& [ni, ci] : counts) {
    best_at_k(ni, ci, k);  // validates
    same_n = same_n && ni == n;
  }
  if (same_n) {
    if (auto total = detail::binomial_exact(n, k)) {
      const unsigned __int128 denom = static_cast<unsigned __int128>(*total) * counts.size();
      if (denom <= detail::kExactLimit) {
        std::uint64_t num = 0;
        for (const auto& [ni, ci] : counts) num += *total - *detail::binomial_exact(n - ci, k);
        return static_cast<double>(num) / static_cast<double>(static_cast<std::uint64_t>(denom));
      }
    }
  }
  std::vector<double> v;
  for (const auto& [ni, ci] : counts) v.push_back(best_at_k(ni, ci, k));
  return mean(v);
}

inline double aggregate(const std::vector<StructureOutcome>& outcomes, int k) {
  if (outcomes.empty()) throw InvalidArgument("aggregate: no structures");
  std::vector<std::pair<int, int>> counts;
  for (const auto& o : outcomes) counts.emplace_back(o.n, o.c);
  return mean_best_at_k(counts, k);
}

}  // namespace posebench::stats
