#pragma once

#include <string>

#include "posebench/chem/structure.hpp"
#include "posebench/validity/environment.hpp"
#include "posebench/validity/geometry.hpp"
#include "posebench/validity/report.hpp"
#include "posebench/validity/topology.hpp"

namespace posebench::validity {

struct LoadStatus {
  bool pred = true;
  bool truth = true;
  bool cond = true;
};

// Report for a pose that could not be evaluated: the load checks reflect
// `status`, every other check fails with `reason`.
inline CheckReport failed_load_report(LoadStatus status, const std::string& reason) {
  CheckReport rep;
  for (auto name : kCheckNames) rep.set(name, false, std::nullopt, "not evaluated: " + reason);
  rep.set("mol_pred_loaded", status.pred, std::nullopt, status.pred ? "" : reason);
  rep.set("mol_true_loaded", status.truth, std::nullopt, status.truth ? "" : reason);
  rep.set("mol_cond_loaded", status.cond, std::nullopt, status.cond ? "" : reason);
  return rep;
}

// All 24 checks for the target ligand of `pred` against the target ligand
// of `truth`. `reference` (optional) is the low-energy conformer used by
// internal_energy.
inline CheckReport run_all_checks(const chem::ComplexStructure& truth, const chem::ComplexStructure& pred,
                                  const CheckConfig& cfg = {}, const chem::RadiiTable& radii = chem::RadiiTable::builtin(),
                                  const chem::LigandInstance* reference = nullptr) {
  cfg.validate();
  if (!truth.has_ligand()) return failed_load_report({true, false, true}, "reference ligand missing");
  if (!pred.has_ligand()) return failed_load_report({false, true, true}, "predicted ligand missing");
  if (pred.protein_atom_count() == 0) return failed_load_report({true, true, false}, "conditioning protein missing");
  const auto& tl = truth.ligand();
  const auto& pl = pred.ligand();
  CheckReport rep = check_topology(tl.graph, pl.graph, pl.coords);
  if (!rep.at("mol_pred_loaded").pass) return failed_load_report({false, true, true}, rep.at("mol_pred_loaded").detail);
  rep.merge(check_stereo(tl.graph, pl.graph, pl.coords));
  rep.merge(check_geometry(pl.graph, pl.coords, cfg, radii, reference ? &reference->graph : nullptr,
                           reference ? &reference->coords : nullptr));
  rep.merge(check_environment(pred, cfg, radii));
  return rep;
}

}  // namespace posebench::validity
