#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posebench/chem/manifest.hpp"
#include "posebench/harness/pose_metrics.hpp"
#include "posebench/stats/bootstrap.hpp"

namespace posebench::harness {

enum class StratAxis { pocket_similarity, ligand_frequency, tanimoto };

inline std::string axis_name(StratAxis a) {
  switch (a) {
    case StratAxis::pocket_similarity: return "pocket_similarity";
    case StratAxis::ligand_frequency: return "ligand_frequency";
    case StratAxis::tanimoto: return "tanimoto";
  }
  return "?";
}

inline StratAxis parse_axis(std::string_view s) {
  for (auto a : {StratAxis::pocket_similarity, StratAxis::ligand_frequency, StratAxis::tanimoto})
    if (axis_name(a) == s) return a;
  throw InvalidArgument("unknown stratification axis '" + std::string(s) + "'");
}

// Similarity axes use half-open bins [e_i, e_i+1), the last one closed so
// that 1.0 is binned. The frequency axis treats edges as integer starts:
// [e_i, e_i+1) and a final open-ended [e_last, inf).
struct StratificationSpec {
  StratAxis axis = StratAxis::pocket_similarity;
  std::vector<double> edges;

  static StratificationSpec defaults(StratAxis axis) {
    if (axis == StratAxis::ligand_frequency) return {axis, {0, 1, 11}};
    return {axis, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}};
  }

  bool open_ended() const { return axis == StratAxis::ligand_frequency; }
  std::size_t bin_count() const { return open_ended() ? edges.size() : edges.size() - 1; }

  void validate() const {
    if (edges.size() < (open_ended() ? 1u : 2u)) throw InvalidArgument("stratification needs more bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i] > edges[i - 1])) throw InvalidArgument("bin edges must be strictly increasing");
  }

  std::optional<std::size_t> bin_of(double v) const {
    const std::size_t m = edges.size();
    for (std::size_t i = 0; i + 1 < m; ++i)
      if (v >= edges[i] && v < edges[i + 1]) return i;
    if (open_ended() && v >= edges[m - 1]) return m - 1;
    if (!open_ended() && v == edges[m - 1]) return m - 2;
    return std::nullopt;
  }

  std::string label(std::size_t i) const {
    if (open_ended()) {
      const auto lo = static_cast<long>(edges[i]);
      if (i + 1 == edges.size()) return ">" + std::to_string(lo - 1);
      const auto hi = static_cast<long>(edges[i + 1]) - 1;
      return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
    }
    const char close = i + 2 == edges.size() ? ']' : ')';
    return "[" + fmt_double(edges[i]) + "," + fmt_double(edges[i + 1]) + close;
  }
};

inline std::optional<double> annotation_value(const chem::Annotations& a, StratAxis axis) {
  switch (axis) {
    case StratAxis::pocket_similarity: return a.pocket_similarity;
    case StratAxis::tanimoto: return a.tanimoto;
    case StratAxis::ligand_frequency:
      return a.ligand_frequency ? std::optional<double>(*a.ligand_frequency) : std::nullopt;
  }
  return std::nullopt;
}

struct BinResult {
  std::string label;
  int n = 0;
  std::optional<double> mean;
  std::optional<double> sem;
};

struct StratifiedResult {
  StratAxis axis;
  Criterion criterion;
  int k = 1;
  std::vector<BinResult> bins;
  std::vector<std::string> excluded;  // entries without the annotation
};

// Per-bin best@k aggregate and bootstrap SEM. `poses` must be sorted.
inline StratifiedResult stratify(const std::vector<PoseMetrics>& poses,
                                 const std::map<std::string, chem::Annotations>& annotations,
                                 const StratificationSpec& spec, Criterion criterion, int k, int bootstrap_iters = 1000,
                                 std::uint64_t seed = 0) {
  spec.validate();
  StratifiedResult r{spec.axis, criterion, k, {}, {}};
  std::vector<std::vector<std::vector<const PoseMetrics*>>> members(spec.bin_count());
  for (const auto& [id, group] : group_by_entry(poses)) {
    auto it = annotations.find(id);
    std::optional<double> v = it == annotations.end() ? std::nullopt : annotation_value(it->second, spec.axis);
    std::optional<std::size_t> b = v ? spec.bin_of(*v) : std::nullopt;
    if (!b) {
      r.excluded.push_back(id);
      continue;
    }
    members[*b].push_back(group);
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    BinResult br;
    br.label = spec.label(i);
    br.n = static_cast<int>(members[i].size());
    if (br.n > 0) {
      std::vector<double> values;
      for (const auto& g : members[i]) values.push_back(structure_value(g, criterion, k));
      if (is_binary(criterion)) {
        std::vector<std::pair<int, int>> counts;
        for (const auto& g : members[i]) {
          int c = 0;
          for (const auto* p : g) c += succeeds(*p, criterion);
          counts.emplace_back(static_cast<int>(g.size()), c);
        }
        br.mean = stats::mean_best_at_k(counts, k);
      } else {
        br.mean = stats::mean(values);
      }
      br.sem = stats::bootstrap(values, bootstrap_iters, seed).sem;
    }
    r.bins.push_back(br);
  }
  return r;
}

}  // namespace posebench::harness
