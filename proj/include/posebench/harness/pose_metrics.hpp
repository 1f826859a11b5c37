#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "posebench/harness/config.hpp"
#include "posebench/harness/util.hpp"
#include "posebench/stats/best_at_k.hpp"
#include "posebench/validity/report.hpp"

namespace posebench::harness {

struct PoseMetrics {
  std::string entry_id;
  int seed = 0;
  int sample = 0;
  bool evaluated = false;  // false: parse or topology failure
  std::string error;
  double rmsd = std::numeric_limits<double>::quiet_NaN();
  double lddt_pli = 0.0;
  bool pb_valid = false;
  validity::CheckReport checks;
  std::optional<double> confidence;
  double wall_time = 0.0;  // seconds; never written to deterministic outputs

  auto order_key() const { return std::tie(entry_id, seed, sample); }
};

// Failed poses count as non-success under every criterion.
inline bool succeeds(const PoseMetrics& p, Criterion c) {
  if (!p.evaluated) return false;
  switch (c) {
    case Criterion::rmsd2: return p.rmsd < 2.0;
    case Criterion::rmsd2_pb: return p.rmsd < 2.0 && p.pb_valid;
    case Criterion::rmsd1: return p.rmsd < 1.0;
    case Criterion::rmsd1_pb: return p.rmsd < 1.0 && p.pb_valid;
    case Criterion::lddt_pli: return false;
  }
  return false;
}

inline double pose_value(const PoseMetrics& p, Criterion c) {
  if (c == Criterion::lddt_pli) return p.evaluated ? p.lddt_pli : 0.0;
  return succeeds(p, c) ? 1.0 : 0.0;
}

inline void sort_poses(std::vector<PoseMetrics>& poses) {
  std::sort(poses.begin(), poses.end(), [](const PoseMetrics& a, const PoseMetrics& b) { return a.order_key() < b.order_key(); });
}

// Consecutive runs of one entry id; input must be sorted.
inline std::vector<std::pair<std::string, std::vector<const PoseMetrics*>>> group_by_entry(const std::vector<PoseMetrics>& poses) {
  std::vector<std::pair<std::string, std::vector<const PoseMetrics*>>> out;
  for (const auto& p : poses) {
    if (out.empty() || out.back().first != p.entry_id) out.push_back({p.entry_id, {}});
    out.back().second.push_back(&p);
  }
  return out;
}

inline stats::StructureOutcome outcome_for(const std::string& id, const std::vector<const PoseMetrics*>& poses, Criterion c) {
  std::vector<stats::PoseOutcome> po;
  for (const auto* p : poses) po.push_back({p->seed, p->sample, succeeds(*p, c), p->confidence});
  return stats::make_outcome(id, std::move(po));
}

// Per-structure best@k value under `c`: the unbiased success estimator for
// thresholded criteria, the expected best-of-k score for lDDT-PLI.
inline double structure_value(const std::vector<const PoseMetrics*>& poses, Criterion c, int k) {
  if (is_binary(c)) {
    int cnt = 0;
    for (const auto* p : poses) cnt += succeeds(*p, c);
    return stats::best_at_k(static_cast<int>(poses.size()), cnt, k);
  }
  std::vector<double> v;
  for (const auto* p : poses) v.push_back(pose_value(*p, c));
  return stats::expected_max_at_k(std::move(v), k);
}

// ---------------------------------------------------------------------------
// poses.csv / checks.csv

inline std::string poses_csv_header() {
  std::string h = "entry_id,seed,sample,status,rmsd,lddt_pli,pb_valid,confidence";
  for (auto n : validity::kCheckNames) h += "," + std::string(n);
  return h + ",error\n";
}

inline std::string poses_to_csv(const std::vector<PoseMetrics>& poses) {
  std::string out = poses_csv_header();
  for (const auto& p : poses) {
    out += csv_escape(p.entry_id) + "," + std::to_string(p.seed) + "," + std::to_string(p.sample) + "," +
           (p.evaluated ? "ok" : "failed") + "," + (p.evaluated ? fmt_double(p.rmsd) : "") + "," +
           fmt_double(p.lddt_pli) + "," + (p.pb_valid ? "1" : "0") + "," +
           (p.confidence ? fmt_double(*p.confidence) : "");
    for (std::size_t i = 0; i < validity::kCheckCount; ++i) {
      const auto& s = p.checks.slot(i);
      out += s ? (s->pass ? ",1" : ",0") : ",";
    }
    out += "," + csv_escape(p.error) + "\n";
  }
  return out;
}

inline std::string checks_to_csv(const std::vector<PoseMetrics>& poses) {
  std::string out = "entry_id,seed,sample,check,pass,value,detail\n";
  for (const auto& p : poses)
    for (std::size_t i = 0; i < validity::kCheckCount; ++i) {
      const auto& s = p.checks.slot(i);
      if (!s) continue;
      out += csv_escape(p.entry_id) + "," + std::to_string(p.seed) + "," + std::to_string(p.sample) + "," +
             std::string(validity::kCheckNames[i]) + "," + (s->pass ? "1" : "0") + "," +
             (s->value ? fmt_double(*s->value) : "") + "," + csv_escape(s->detail) + "\n";
    }
  return out;
}

// Reads poses.csv back (check values and details are not restored).
inline std::vector<PoseMetrics> poses_from_csv(std::string_view text) {
  std::vector<PoseMetrics> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  const std::size_t ncols = 8 + validity::kCheckCount + 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 || line.empty()) continue;
    auto f = csv_split(line);
    if (f.size() != ncols) throw ParseError("poses.csv: expected " + std::to_string(ncols) + " columns", lineno);
    PoseMetrics p;
    p.entry_id = f[0];
    if (!chem::detail::parse_int(f[1], p.seed) || !chem::detail::parse_int(f[2], p.sample))
      throw ParseError("poses.csv: bad seed/sample", lineno);
    p.evaluated = f[3] == "ok";
    if (p.evaluated && !chem::detail::parse_double(f[4], p.rmsd)) throw ParseError("poses.csv: bad rmsd", lineno);
    if (!chem::detail::parse_double(f[5], p.lddt_pli)) throw ParseError("poses.csv: bad lddt_pli", lineno);
    p.pb_valid = f[6] == "1";
    if (!f[7].empty()) {
      double c;
      if (!chem::detail::parse_double(f[7], c)) throw ParseError("poses.csv: bad confidence", lineno);
      p.confidence = c;
    }
    for (std::size_t i = 0; i < validity::kCheckCount; ++i)
      if (!f[8 + i].empty()) p.checks.set(validity::kCheckNames[i], f[8 + i] == "1");
    p.error = f.back();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace posebench::harness
