#pragma once

#include <string>
#include <vector>

#include "posebench/molgraph/graph.hpp"
#include "posebench/molgraph/isomorphism.hpp"
#include "posebench/molgraph/stereo.hpp"
#include "posebench/validity/geometry.hpp"
#include "posebench/validity/report.hpp"

namespace posebench::validity {

// The three load checks plus sanitization, all_atoms_connected,
// molecular_formula and molecular_bonds. Called once both ligands and the
// conditioning protein have been read.
inline CheckReport check_topology(const MolecularGraph& truth, const MolecularGraph& pred, const Coords& pred_xyz) {
  CheckReport rep;
  bool coords_ok = pred_xyz.size() == pred.size();
  for (const auto& c : pred_xyz) coords_ok = coords_ok && c.allFinite();
  rep.set("mol_pred_loaded", coords_ok && !pred.empty(), std::nullopt,
          coords_ok ? std::to_string(pred.size()) + " heavy atoms" : "coordinates missing or non-finite");
  rep.set("mol_true_loaded", !truth.empty(), std::nullopt, std::to_string(truth.size()) + " heavy atoms");
  rep.set("mol_cond_loaded", true);

  std::string bad;
  for (int i = 0; i < static_cast<int>(pred.size()); ++i)
    if (!molgraph::valence_ok(pred, i)) bad += (bad.empty() ? "" : ",") + atom_label(pred, i);
  rep.set("sanitization", bad.empty(), std::nullopt, bad.empty() ? "" : "valence exceeded at " + bad);

  rep.set("all_atoms_connected", pred.fragment_count() <= 1, static_cast<double>(pred.fragment_count()), "fragments");

  const auto ft = molgraph::molecular_formula(truth), fp = molgraph::molecular_formula(pred);
  rep.set("molecular_formula", ft == fp, std::nullopt, fp + (ft == fp ? " == " : " != ") + ft);

  const bool match = molgraph::graphs_match(truth, pred).has_value();
  rep.set("molecular_bonds", match, std::nullopt, match ? "" : "bond graph differs from reference");
  return rep;
}

// tetrahedral_chirality and double_bond_stereochemistry. Stereo in `truth`
// is read from its own annotations (set at parse time); the prediction is
// judged from `pred_xyz` alone. Each check passes when some
// truth -> prediction correspondence reproduces every stereo element.
inline CheckReport check_stereo(const MolecularGraph& truth, const MolecularGraph& pred, const Coords& pred_xyz,
                                std::size_t max_maps = molgraph::kDefaultMaxAutomorphisms) {
  CheckReport rep;
  std::vector<int> centers, dbonds;
  for (int i = 0; i < static_cast<int>(truth.size()); ++i)
    if (truth.atom(i).parity) centers.push_back(i);
  for (int k = 0; k < static_cast<int>(truth.bonds().size()); ++k)
    if (truth.bond(k).stereo) dbonds.push_back(k);

  if (pred_xyz.size() != pred.size()) {
    rep.set("tetrahedral_chirality", false, std::nullopt, "prediction coordinates missing");
    rep.set("double_bond_stereochemistry", false, std::nullopt, "prediction coordinates missing");
    return rep;
  }

  bool tet_ok = centers.empty(), db_ok = dbonds.empty();
  std::size_t maps = 0;
  molgraph::for_each_isomorphism(truth, pred, max_maps, [&](const std::vector<int>& m) {
    ++maps;
    if (!tet_ok) {
      bool all = true;
      for (int c : centers) {
        auto p = molgraph::tetrahedral_parity(truth, c, pred_xyz, m);
        if (!p || *p != *truth.atom(c).parity) {
          all = false;
          break;
        }
      }
      tet_ok = all;
    }
    if (!db_ok) {
      bool all = true;
      for (int k : dbonds) {
        const auto& b = truth.bond(k);
        const auto& s = *b.stereo;
        auto P = [&](int i) { return pred_xyz[static_cast<std::size_t>(m[static_cast<std::size_t>(i)])]; };
        const double dih = molgraph::dihedral_degrees(P(s.ref_a), P(b.a), P(b.b), P(s.ref_b));
        const auto cfg = std::abs(dih) < 90.0 ? molgraph::DoubleBondConfig::cis : molgraph::DoubleBondConfig::trans;
        if (cfg != s.config) {
          all = false;
          break;
        }
      }
      db_ok = all;
    }
    return !(tet_ok && db_ok);
  });

  if (maps == 0 && !(centers.empty() && dbonds.empty())) {
    rep.set("tetrahedral_chirality", centers.empty(), std::nullopt,
            centers.empty() ? "no stereocentres" : "graphs do not match");
    rep.set("double_bond_stereochemistry", dbonds.empty(), std::nullopt,
            dbonds.empty() ? "no stereo double bonds" : "graphs do not match");
    return rep;
  }
  rep.set("tetrahedral_chirality", tet_ok, static_cast<double>(centers.size()),
          centers.empty() ? "no stereocentres" : "stereocentres");
  rep.set("double_bond_stereochemistry", db_ok, static_cast<double>(dbonds.size()),
          dbonds.empty() ? "no stereo double bonds" : "stereo double bonds");
  return rep;
}

}  // namespace posebench::validity
