#pragma once

#include <algorithm>
#include <compare>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posebench/chem/elements.hpp"
#include "posebench/error.hpp"
#include "posebench/molgraph/graph.hpp"
#include "posebench/vec3.hpp"

namespace posebench::chem {

struct AtomSite {
  std::string name;
  AtomicNumber element = 0;
  Vec3 coords = Vec3::Zero();
  double occupancy = 1.0;
  bool is_hetero = false;
  bool operator==(const AtomSite&) const = default;
};

// (chain, author sequence number, insertion code). Ordered lexicographically,
// which is also the tie-break order used by pocket selection.
struct ResidueKey {
  std::string chain_id;
  int seq_index = 0;
  std::string insertion_code;

  auto operator<=>(const ResidueKey&) const = default;
  bool operator==(const ResidueKey&) const = default;

  std::string to_string() const { return chain_id + ":" + std::to_string(seq_index) + insertion_code; }
};

struct ResidueSite {
  ResidueKey key;
  std::string res_name;
  std::vector<AtomSite> atoms;

  const AtomSite* find_atom(std::string_view atom_name) const {
    for (const auto& a : atoms)
      if (a.name == atom_name) return &a;
    return nullptr;
  }
  bool operator==(const ResidueSite&) const = default;
};

struct ProteinChain {
  std::string id;
  std::vector<ResidueSite> residues;
  bool operator==(const ProteinChain&) const = default;
};

struct LigandInstance {
  std::string name;
  molgraph::MolecularGraph graph;
  Coords coords;
  bool operator==(const LigandInstance&) const = default;
};

// Non-target hetero groups, each a residue-like record with coordinates.
struct CofactorGroups {
  std::vector<ResidueSite> organic;
  std::vector<ResidueSite> inorganic;
  std::vector<ResidueSite> water;
  bool operator==(const CofactorGroups&) const = default;
};

struct ComplexStructure {
  std::vector<ProteinChain> chains;
  std::vector<LigandInstance> ligands;
  CofactorGroups cofactors;
  // Index into `ligands` of the instance under evaluation; any other ligand
  // instances count as organic cofactors.
  std::size_t target_ligand = 0;

  bool has_ligand() const { return target_ligand < ligands.size() && !ligands[target_ligand].graph.empty(); }
  const LigandInstance& ligand() const {
    if (!has_ligand()) throw Error("structure has no target ligand");
    return ligands[target_ligand];
  }

  std::size_t protein_atom_count() const {
    std::size_t n = 0;
    for (const auto& c : chains)
      for (const auto& r : c.residues) n += r.atoms.size();
    return n;
  }

  template <class F>
  void for_each_residue(F&& f) const {
    for (const auto& c : chains)
      for (const auto& r : c.residues) f(r);
  }

  const ResidueSite* find_residue(const ResidueKey& key) const {
    for (const auto& c : chains) {
      if (c.id != key.chain_id) continue;
      for (const auto& r : c.residues)
        if (r.key == key) return &r;
    }
    return nullptr;
  }

  bool operator==(const ComplexStructure&) const = default;
};

inline void validate_ligand(const LigandInstance& lig) {
  if (lig.coords.size() != lig.graph.size())
    throw TopologyError("ligand '" + lig.name + "' has " + std::to_string(lig.coords.size()) +
                        " coordinates for " + std::to_string(lig.graph.size()) + " heavy atoms");
  for (const auto& c : lig.coords)
    if (!c.allFinite()) throw Error("ligand '" + lig.name + "' has non-finite coordinates");
}

// Every heavy atom of every protein residue, in chain/residue/atom order.
inline Coords protein_coords(const ComplexStructure& s) {
  Coords out;
  s.for_each_residue([&](const ResidueSite& r) {
    for (const auto& a : r.atoms) out.push_back(a.coords);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Canonical JSON form. Doubles are written with round-trip precision, so
// parse -> to_json -> from_json reproduces the structure exactly.

inline nlohmann::json vec_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }
inline Vec3 vec_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

inline nlohmann::json graph_to_json(const molgraph::MolecularGraph& g) {
  nlohmann::json atoms = nlohmann::json::array(), bonds = nlohmann::json::array();
  for (const auto& a : g.atoms())
    atoms.push_back({{"element", std::string(element_symbol(a.element))},
                     {"charge", a.formal_charge},
                     {"hydrogens", a.hydrogens},
                     {"parity", a.parity ? nlohmann::json(*a.parity) : nlohmann::json(nullptr)}});
  for (const auto& b : g.bonds()) {
    nlohmann::json jb = {{"a", b.a}, {"b", b.b}, {"order", static_cast<int>(b.order)}};
    if (b.stereo)
      jb["stereo"] = {{"ref_a", b.stereo->ref_a},
                      {"ref_b", b.stereo->ref_b},
                      {"config", b.stereo->config == molgraph::DoubleBondConfig::cis ? "cis" : "trans"}};
    bonds.push_back(std::move(jb));
  }
  return {{"atoms", atoms}, {"bonds", bonds}};
}

inline molgraph::MolecularGraph graph_from_json(const nlohmann::json& j) {
  std::vector<molgraph::Atom> atoms;
  std::vector<molgraph::Bond> bonds;
  for (const auto& ja : j.at("atoms")) {
    molgraph::Atom a;
    auto z = element_from_symbol(ja.at("element").get<std::string>());
    if (!z) throw ParseError("unknown element " + ja.at("element").get<std::string>());
    a.element = *z;
    a.formal_charge = ja.at("charge").get<int>();
    a.hydrogens = ja.at("hydrogens").get<int>();
    if (!ja.at("parity").is_null()) a.parity = ja.at("parity").get<int>();
    atoms.push_back(a);
  }
  for (const auto& jb : j.at("bonds")) {
    molgraph::Bond b;
    b.a = jb.at("a").get<int>();
    b.b = jb.at("b").get<int>();
    b.order = static_cast<molgraph::BondOrder>(jb.at("order").get<int>());
    if (jb.contains("stereo")) {
      const auto& s = jb.at("stereo");
      b.stereo = molgraph::DoubleBondStereo{s.at("ref_a").get<int>(), s.at("ref_b").get<int>(),
                                            s.at("config").get<std::string>() == "cis" ? molgraph::DoubleBondConfig::cis
                                                                                       : molgraph::DoubleBondConfig::trans};
    }
    bonds.push_back(b);
  }
  return molgraph::MolecularGraph(std::move(atoms), std::move(bonds));
}

inline nlohmann::json residue_to_json(const ResidueSite& r) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : r.atoms)
    atoms.push_back({{"name", a.name},
                     {"element", std::string(element_symbol(a.element))},
                     {"xyz", vec_to_json(a.coords)},
                     {"occupancy", a.occupancy},
                     {"hetero", a.is_hetero}});
  return {{"chain", r.key.chain_id}, {"seq", r.key.seq_index}, {"icode", r.key.insertion_code},
          {"name", r.res_name}, {"atoms", atoms}};
}

inline ResidueSite residue_from_json(const nlohmann::json& j) {
  ResidueSite r;
  r.key = {j.at("chain").get<std::string>(), j.at("seq").get<int>(), j.at("icode").get<std::string>()};
  r.res_name = j.at("name").get<std::string>();
  for (const auto& ja : j.at("atoms")) {
    AtomSite a;
    a.name = ja.at("name").get<std::string>();
    auto z = element_from_symbol(ja.at("element").get<std::string>());
    if (!z) throw ParseError("unknown element " + ja.at("element").get<std::string>());
    a.element = *z;
    a.coords = vec_from_json(ja.at("xyz"));
    a.occupancy = ja.at("occupancy").get<double>();
    a.is_hetero = ja.at("hetero").get<bool>();
    r.atoms.push_back(std::move(a));
  }
  return r;
}

inline nlohmann::json to_canonical_json(const ComplexStructure& s) {
  nlohmann::json chains = nlohmann::json::array(), ligands = nlohmann::json::array();
  for (const auto& c : s.chains) {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& r : c.residues) res.push_back(residue_to_json(r));
    chains.push_back({{"id", c.id}, {"residues", res}});
  }
  for (const auto& l : s.ligands) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& v : l.coords) coords.push_back(vec_to_json(v));
    ligands.push_back({{"name", l.name}, {"graph", graph_to_json(l.graph)}, {"coords", coords}});
  }
  auto group = [](const std::vector<ResidueSite>& g) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : g) out.push_back(residue_to_json(r));
    return out;
  };
  return {{"format", "posebench-structure-1"},
          {"chains", chains},
          {"ligands", ligands},
          {"target_ligand", s.target_ligand},
          {"cofactors",
           {{"organic", group(s.cofactors.organic)},
            {"inorganic", group(s.cofactors.inorganic)},
            {"water", group(s.cofactors.water)}}}};
}

inline ComplexStructure from_canonical_json(const nlohmann::json& j) {
  ComplexStructure s;
  for (const auto& jc : j.at("chains")) {
    ProteinChain c;
    c.id = jc.at("id").get<std::string>();
    for (const auto& jr : jc.at("residues")) c.residues.push_back(residue_from_json(jr));
    s.chains.push_back(std::move(c));
  }
  for (const auto& jl : j.at("ligands")) {
    LigandInstance l;
    l.name = jl.at("name").get<std::string>();
    l.graph = graph_from_json(jl.at("graph"));
    for (const auto& v : jl.at("coords")) l.coords.push_back(vec_from_json(v));
    validate_ligand(l);
    s.ligands.push_back(std::move(l));
  }
  s.target_ligand = j.at("target_ligand").get<std::size_t>();
  auto group = [](const nlohmann::json& jg) {
    std::vector<ResidueSite> out;
    for (const auto& jr : jg) out.push_back(residue_from_json(jr));
    return out;
  };
  const auto& jc = j.at("cofactors");
  s.cofactors.organic = group(jc.at("organic"));
  s.cofactors.inorganic = group(jc.at("inorganic"));
  s.cofactors.water = group(jc.at("water"));
  return s;
}

}  // namespace posebench::chem
