#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "posebench/chem/structure.hpp"
#include "posebench/geom/kabsch.hpp"
#include "posebench/molgraph/isomorphism.hpp"

namespace posebench::geom {

using chem::ComplexStructure;
using chem::ResidueKey;

inline constexpr double kDefaultSiteCutoff = 10.0;

// Residues with any heavy atom strictly closer than `cutoff` to any heavy
// atom of the target ligand, in key order.
inline std::vector<ResidueKey> binding_site(const ComplexStructure& truth, double cutoff = kDefaultSiteCutoff) {
  const auto& lig = truth.ligand();
  const double c2 = cutoff * cutoff;
  std::vector<ResidueKey> out;
  truth.for_each_residue([&](const chem::ResidueSite& r) {
    for (const auto& a : r.atoms)
      for (const auto& x : lig.coords)
        if ((a.coords - x).squaredNorm() < c2) {
          out.push_back(r.key);
          return;
        }
  });
  if (out.empty()) throw CoverageError("no protein residue within " + std::to_string(cutoff) + " A of the ligand");
  std::sort(out.begin(), out.end());
  return out;
}

struct RmsdConfig {
  double site_cutoff = kDefaultSiteCutoff;
  bool ca_only = true;  // superpose on C-alpha, otherwise on all matched site atoms
  std::size_t max_automorphisms = molgraph::kDefaultMaxAutomorphisms;
};

struct SymmetryRmsd {
  double rmsd = 0.0;
  double naive_rmsd = 0.0;   // identity correspondence (only when atom orders agree)
  Superposition site_fit;    // maps predicted frame onto the truth frame
  std::size_t site_atoms = 0;
  std::size_t mappings = 0;
  bool truncated = false;
};

// Matched (truth, pred) anchor atoms of the binding site.
inline std::pair<Coords, Coords> site_anchors(const ComplexStructure& truth, const ComplexStructure& pred,
                                              const std::vector<ResidueKey>& site, bool ca_only) {
  Coords p, q;
  for (const auto& key : site) {
    const auto* rt = truth.find_residue(key);
    if (!rt) continue;
    const auto* rp = pred.find_residue(key);
    if (ca_only) {
      const auto* at = rt->find_atom("CA");
      if (!at) continue;
      const auto* ap = rp ? rp->find_atom("CA") : nullptr;
      if (!ap) throw CoverageError("prediction lacks C-alpha of binding-site residue " + key.to_string());
      p.push_back(at->coords);
      q.push_back(ap->coords);
    } else {
      if (!rp) throw CoverageError("prediction lacks binding-site residue " + key.to_string());
      for (const auto& at : rt->atoms)
        if (const auto* ap = rp->find_atom(at.name)) {
          p.push_back(at.coords);
          q.push_back(ap->coords);
        }
    }
  }
  if (p.size() < 3) throw CoverageError("fewer than 3 binding-site anchor atoms");
  return {std::move(p), std::move(q)};
}

// Minimum over truth -> pred graph isomorphisms of the ligand RMSD between
// `truth_xyz` and `pred_xyz`.
inline double symmetric_rmsd(const molgraph::MolecularGraph& truth_g, const Coords& truth_xyz,
                             const molgraph::MolecularGraph& pred_g, const Coords& pred_xyz,
                             std::size_t max_count = molgraph::kDefaultMaxAutomorphisms, std::size_t* n_maps = nullptr,
                             bool* truncated = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  const bool cut = molgraph::for_each_isomorphism(truth_g, pred_g, max_count, [&](const std::vector<int>& m) {
    double sq = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) sq += (truth_xyz[i] - pred_xyz[static_cast<std::size_t>(m[i])]).squaredNorm();
    best = std::min(best, sq);
    ++count;
    return true;
  });
  if (count == 0) throw TopologyError("predicted ligand graph does not match the reference ligand");
  if (n_maps) *n_maps = count;
  if (truncated) *truncated = cut;
  return std::sqrt(best / static_cast<double>(truth_xyz.size()));
}

// Binding-site superposed, symmetry-corrected ligand RMSD. The site fit is
// computed once; the symmetry search runs on the fitted ligand.
inline SymmetryRmsd bisy_rmsd_detail(const ComplexStructure& truth, const ComplexStructure& pred, const RmsdConfig& cfg = {}) {
  const auto& tl = truth.ligand();
  const auto& pl = pred.ligand();
  if (tl.graph.size() != pl.graph.size())
    throw TopologyError("ligand heavy-atom counts differ (" + std::to_string(tl.graph.size()) + " vs " +
                        std::to_string(pl.graph.size()) + ")");
  const auto site = binding_site(truth, cfg.site_cutoff);
  const auto [p, q] = site_anchors(truth, pred, site, cfg.ca_only);
  SymmetryRmsd r;
  r.site_fit = kabsch(p, q);
  r.site_atoms = p.size();
  const Coords moved = r.site_fit.apply(pl.coords);
  r.naive_rmsd = rmsd(tl.coords, moved);
  r.rmsd = symmetric_rmsd(tl.graph, tl.coords, pl.graph, moved, cfg.max_automorphisms, &r.mappings, &r.truncated);
  return r;
}

inline double bisy_rmsd(const ComplexStructure& truth, const ComplexStructure& pred, const RmsdConfig& cfg = {}) {
  return bisy_rmsd_detail(truth, pred, cfg).rmsd;
}

// ---------------------------------------------------------------------------

struct LddtConfig {
  double inclusion_radius = 6.0;
  std::vector<double> thresholds{0.5, 1.0, 2.0, 4.0};
  std::size_t max_automorphisms = molgraph::kDefaultMaxAutomorphisms;

  void validate() const {
    if (!(inclusion_radius > 0.0)) throw InvalidArgument("lDDT inclusion radius must be positive");
    if (thresholds.empty()) throw InvalidArgument("lDDT needs at least one threshold");
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (!(thresholds[i] > 0.0) || (i > 0 && !(thresholds[i] > thresholds[i - 1])))
        throw InvalidArgument("lDDT thresholds must be positive and strictly increasing");
  }
};

namespace detail {

struct InterfacePair {
  int lig_atom;
  const Vec3* pred_protein;  // null when the prediction lacks the atom
  double d_true;
};

inline std::vector<InterfacePair> interface_pairs(const ComplexStructure& truth, const ComplexStructure& pred, double radius) {
  std::map<std::tuple<std::string, int, std::string, std::string>, const Vec3*> pred_atoms;
  pred.for_each_residue([&](const chem::ResidueSite& r) {
    for (const auto& a : r.atoms)
      pred_atoms.emplace(std::make_tuple(r.key.chain_id, r.key.seq_index, r.key.insertion_code, a.name), &a.coords);
  });
  const auto& lig = truth.ligand();
  const double r2 = radius * radius;
  std::vector<InterfacePair> out;
  truth.for_each_residue([&](const chem::ResidueSite& r) {
    for (const auto& a : r.atoms) {
      const Vec3* pp = nullptr;
      bool looked_up = false;
      for (std::size_t i = 0; i < lig.coords.size(); ++i) {
        const double d2 = (a.coords - lig.coords[i]).squaredNorm();
        if (d2 >= r2) continue;
        if (!looked_up) {
          auto it = pred_atoms.find(std::make_tuple(r.key.chain_id, r.key.seq_index, r.key.insertion_code, a.name));
          pp = it == pred_atoms.end() ? nullptr : it->second;
          looked_up = true;
        }
        out.push_back({static_cast<int>(i), pp, std::sqrt(d2)});
      }
    }
  });
  return out;
}

}  // namespace detail

// Fraction of truth interface distances (ligand atom, protein atom closer
// than the inclusion radius) reproduced in the prediction, averaged over
// thresholds and maximised over ligand symmetry. Protein atoms absent from
// the prediction count as not preserved.
inline double lddt_pli(const ComplexStructure& truth, const ComplexStructure& pred, const LddtConfig& cfg = {}) {
  cfg.validate();
  const auto& tl = truth.ligand();
  const auto& pl = pred.ligand();
  const auto pairs = detail::interface_pairs(truth, pred, cfg.inclusion_radius);
  if (pairs.empty()) throw CoverageError("no protein-ligand interface pairs within the inclusion radius");
  const double denom = static_cast<double>(pairs.size() * cfg.thresholds.size());
  std::size_t best = 0;
  std::size_t count = 0;
  molgraph::for_each_isomorphism(tl.graph, pl.graph, cfg.max_automorphisms, [&](const std::vector<int>& m) {
    std::size_t kept = 0;
    for (const auto& pr : pairs) {
      if (!pr.pred_protein) continue;
      const double dp = (pl.coords[static_cast<std::size_t>(m[static_cast<std::size_t>(pr.lig_atom)])] - *pr.pred_protein).norm();
      const double dd = std::abs(dp - pr.d_true);
      for (double t : cfg.thresholds)
        if (dd < t) ++kept;
    }
    best = std::max(best, kept);
    ++count;
    return true;
  });
  if (count == 0) throw TopologyError("predicted ligand graph does not match the reference ligand");
  return static_cast<double>(best) / denom;
}

}  // namespace posebench::geom
