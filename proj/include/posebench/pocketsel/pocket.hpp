#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "posebench/chem/structure.hpp"

namespace posebench::pocketsel {

using chem::ResidueKey;

enum class MedianMode {
  // Per ligand atom, the minimum distance to the residue's heavy atoms;
  // median over ligand atoms.
  per_ligand_atom,
  // Median over every (ligand atom, residue atom) pair closer than the
  // candidate radius.
  all_close_pairs,
};

struct PocketConfig {
  double candidate_radius = 6.0;
  int min_separation = 8;
  std::size_t max_residues = 2;
  MedianMode mode = MedianMode::per_ligand_atom;
};

struct PocketResidue {
  ResidueKey key;
  std::string res_name;
  double median_distance = 0.0;
  bool operator==(const PocketResidue&) const = default;
};

struct PocketSelection {
  std::vector<PocketResidue> residues;
  std::vector<PocketResidue> candidates;  // all scored candidates, best first
  std::string warning;
  bool operator==(const PocketSelection&) const = default;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of empty list");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline bool separated(const ResidueKey& a, const ResidueKey& b, int min_separation) {
  return a.chain_id != b.chain_id || std::abs(a.seq_index - b.seq_index) >= min_separation;
}

// Up to two pocket residues: the candidate with the smallest median
// distance, then the best remaining candidate far enough away in sequence.
inline PocketSelection select_pocket_residues(const chem::ComplexStructure& truth, const PocketConfig& cfg = {}) {
  const auto& lig = truth.ligand();
  PocketSelection sel;
  const double r2 = cfg.candidate_radius * cfg.candidate_radius;
  truth.for_each_residue([&](const chem::ResidueSite& r) {
    if (r.atoms.empty()) return;
    bool candidate = false;
    std::vector<double> per_atom, pairs;
    for (const auto& x : lig.coords) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& a : r.atoms) {
        const double d2 = (a.coords - x).squaredNorm();
        best = std::min(best, d2);
        if (d2 < r2) {
          candidate = true;
          pairs.push_back(std::sqrt(d2));
        }
      }
      per_atom.push_back(std::sqrt(best));
    }
    if (!candidate) return;
    const double score = cfg.mode == MedianMode::per_ligand_atom ? median(per_atom) : median(pairs);
    sel.candidates.push_back({r.key, r.res_name, score});
  });
  std::sort(sel.candidates.begin(), sel.candidates.end(), [](const PocketResidue& a, const PocketResidue& b) {
    if (a.median_distance != b.median_distance) return a.median_distance < b.median_distance;
    return a.key < b.key;
  });
  if (sel.candidates.empty()) {
    sel.warning = "no residue within " + std::to_string(cfg.candidate_radius) + " A of the ligand";
    return sel;
  }
  for (const auto& c : sel.candidates) {
    if (sel.residues.size() >= cfg.max_residues) break;
    bool ok = true;
    for (const auto& s : sel.residues) ok = ok && separated(c.key, s.key, cfg.min_separation);
    if (ok) sel.residues.push_back(c);
  }
  return sel;
}

}  // namespace posebench::pocketsel
