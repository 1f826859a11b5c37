#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "posebench/harness/config.hpp"
#include "posebench/harness/pose_metrics.hpp"
#include "posebench/stats/bootstrap.hpp"
#include "posebench/stats/significance.hpp"

namespace posebench::harness {

struct Comparison {
  double delta_mean = 0.0;  // mean(a) - mean(b) of per-structure best@k
  double p = 1.0;
  std::string stars;
  int n = 0;
};

inline std::map<std::string, double> per_structure_values(const std::vector<PoseMetrics>& sorted_poses, Criterion c, int k) {
  std::map<std::string, double> out;
  for (const auto& [id, g] : group_by_entry(sorted_poses)) out[id] = structure_value(g, c, k);
  return out;
}

// Paired one-sided test of "method a beats method b" over shared entries.
inline Comparison compare_methods(std::vector<PoseMetrics> a, std::vector<PoseMetrics> b, int k, Criterion c,
                                  SignificanceMethod method = SignificanceMethod::ttest, int bootstrap_iters = 1000,
                                  std::uint64_t seed = 0) {
  sort_poses(a);
  sort_poses(b);
  const auto va = per_structure_values(a, c, k), vb = per_structure_values(b, c, k);
  std::vector<std::string> only;
  for (const auto& [id, v] : va)
    if (!vb.count(id)) only.push_back(id);
  for (const auto& [id, v] : vb)
    if (!va.count(id)) only.push_back(id);
  if (!only.empty()) {
    std::string list;
    for (const auto& id : only) list += (list.empty() ? "" : ", ") + id;
    throw InvalidArgument("entry sets differ; not in both: " + list);
  }
  std::vector<double> xa, xb;
  for (const auto& [id, v] : va) {
    xa.push_back(v);
    xb.push_back(vb.at(id));
  }
  Comparison r;
  r.n = static_cast<int>(xa.size());
  r.delta_mean = stats::mean(xa) - stats::mean(xb);
  r.p = method == SignificanceMethod::ttest ? stats::paired_one_sided_ttest(xa, xb)
                                            : stats::bootstrap_paired_p(xa, xb, bootstrap_iters, seed);
  r.stars = stats::significance_stars(r.p);
  return r;
}

}  // namespace posebench::harness
