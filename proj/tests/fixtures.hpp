#pragma once

// Shared constructed molecules and complexes for the test suites.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "posebench.hpp"

namespace fixtures {

using posebench::Coords;
using posebench::Vec3;
using posebench::chem::ComplexStructure;
using posebench::chem::LigandInstance;
using posebench::molgraph::Atom;
using posebench::molgraph::Bond;
using posebench::molgraph::BondOrder;
using posebench::molgraph::MolecularGraph;

inline Atom atom(int z, int charge = 0, int h = 0) { return Atom{static_cast<posebench::chem::AtomicNumber>(z), charge, h, std::nullopt}; }
inline Bond bond(int a, int b, BondOrder o = BondOrder::single) { return Bond{a, b, o, std::nullopt}; }

inline MolecularGraph with_hydrogens(MolecularGraph g) {
  for (int i = 0; i < static_cast<int>(g.size()); ++i) g.set_hydrogens(i, posebench::molgraph::implicit_hydrogens(g, i, 0));
  return g;
}

inline MolecularGraph benzene_graph() {
  std::vector<Atom> a(6, atom(6));
  std::vector<Bond> b;
  for (int i = 0; i < 6; ++i) b.push_back(bond(i, (i + 1) % 6, BondOrder::aromatic));
  return with_hydrogens(MolecularGraph(a, b));
}

inline Coords benzene_coords(double r = 1.39) {
  Coords c;
  for (int i = 0; i < 6; ++i) c.emplace_back(r * std::cos(i * M_PI / 3), r * std::sin(i * M_PI / 3), 0.0);
  return c;
}

inline LigandInstance benzene() { return {"benzene", benzene_graph(), benzene_coords()}; }

// Toluene: ring atoms 0-5, methyl carbon 6 on atom 0 along +x.
inline LigandInstance toluene() {
  auto g = benzene_graph();
  std::vector<Atom> a(g.atoms().begin(), g.atoms().end());
  std::vector<Bond> b(g.bonds().begin(), g.bonds().end());
  a.push_back(atom(6));
  b.push_back(bond(0, 6));
  auto c = benzene_coords();
  c.emplace_back(1.39 + 1.50, 0.0, 0.0);
  return {"toluene", with_hydrogens(MolecularGraph(a, b)), c};
}

// para-xylene heavy-atom skeleton: toluene plus methyl 7 on atom 3.
inline LigandInstance para_xylene() {
  auto t = toluene();
  std::vector<Atom> a(t.graph.atoms().begin(), t.graph.atoms().end());
  std::vector<Bond> b(t.graph.bonds().begin(), t.graph.bonds().end());
  a.push_back(atom(6));
  b.push_back(bond(3, 7));
  t.coords.emplace_back(-1.39 - 1.50, 0.0, 0.0);
  for (auto& x : a) x.hydrogens = 0;
  return {"p-xylene", with_hydrogens(MolecularGraph(a, b)), t.coords};
}

// tert-butyl fragment (2-methylpropane heavy atoms plus a hydroxyl to make
// an asymmetric anchor): C0 central, C1..C3 methyls, O4.
inline LigandInstance tert_butanol() {
  std::vector<Atom> a = {atom(6), atom(6), atom(6), atom(6), atom(8)};
  std::vector<Bond> b = {bond(0, 1), bond(0, 2), bond(0, 3), bond(0, 4)};
  const double d = 1.53;
  Coords c = {Vec3(0, 0, 0), d * Vec3(1, 1, 1).normalized(), d * Vec3(1, -1, -1).normalized(),
              d * Vec3(-1, 1, -1).normalized(), 1.43 * Vec3(-1, -1, 1).normalized()};
  return {"tert-butanol", with_hydrogens(MolecularGraph(a, b)), c};
}

inline LigandInstance translated(LigandInstance l, const Vec3& t) {
  for (auto& x : l.coords) x += t;
  return l;
}

// ---------------------------------------------------------------------------
// Synthetic pocket: `n` residues of chain A (seq 1..n) on a ring around the
// origin. Backbone atoms sit at radius >= 7 A, the CB points inwards to
// `cb_radius`. Residue 1 lies half an angular step above +x, so a ligand
// substituent along +x points between two residues.
inline std::vector<posebench::chem::ResidueSite> ring_residues(int n = 12, double cb_radius = 5.5, const std::string& chain = "A") {
  using posebench::chem::AtomSite;
  std::vector<posebench::chem::ResidueSite> out;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * M_PI * (i + 0.5) / n;
    const Vec3 u(std::cos(th), std::sin(th), 0.0), v(-std::sin(th), std::cos(th), 0.0), z(0, 0, 1);
    const double zoff = 1.2 * std::sin(3 * th);
    auto at = [&](double radial, double tang, double dz) { return Vec3(radial * u + tang * v + (zoff + dz) * z); };
    posebench::chem::ResidueSite r;
    r.key = {chain, i + 1, ""};
    r.res_name = "ALA";
    r.atoms = {AtomSite{"N", 7, at(7.6, -1.2, 0.3), 1.0, false}, AtomSite{"CA", 6, at(7.2, 0.0, 0.0), 1.0, false},
               AtomSite{"C", 6, at(7.7, 1.3, -0.2), 1.0, false}, AtomSite{"O", 8, at(8.8, 1.5, -0.6), 1.0, false},
               AtomSite{"CB", 6, at(cb_radius, 0.0, 0.0), 1.0, false}};
    out.push_back(std::move(r));
  }
  return out;
}

inline ComplexStructure pocket_complex(const LigandInstance& lig, int n = 12, double cb_radius = 5.5) {
  ComplexStructure s;
  s.chains.push_back({"A", ring_residues(n, cb_radius)});
  s.ligands = {lig};
  s.target_ligand = 0;
  return s;
}

inline void apply_motion(ComplexStructure& s, const posebench::Mat3& R, const Vec3& t) {
  for (auto& c : s.chains)
    for (auto& r : c.residues)
      for (auto& a : r.atoms) a.coords = R * a.coords + t;
  for (auto* grp : {&s.cofactors.organic, &s.cofactors.inorganic, &s.cofactors.water})
    for (auto& r : *grp)
      for (auto& a : r.atoms) a.coords = R * a.coords + t;
  for (auto& l : s.ligands)
    for (auto& x : l.coords) x = R * x + t;
}

inline posebench::Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// ---------------------------------------------------------------------------
// Text writers

inline std::string pdb_atom_line(const std::string& record, int serial, const std::string& name, const std::string& res,
                                 const std::string& chain, int seq, const Vec3& x, const std::string& element,
                                 double occ = 1.0, char altloc = ' ') {
  char buf[128];
  std::string nm = name.size() < 4 ? " " + name : name;
  std::snprintf(buf, sizeof buf, "%-6s%5d %-4s%c%3s %1s%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %2s\n", record.c_str(),
                serial, nm.c_str(), altloc, res.c_str(), chain.c_str(), seq, x.x(), x.y(), x.z(), occ, 20.0, element.c_str());
  return buf;
}

inline std::string to_pdb(const ComplexStructure& s) {
  std::string out;
  int serial = 1;
  for (const auto& c : s.chains)
    for (const auto& r : c.residues)
      for (const auto& a : r.atoms)
        out += pdb_atom_line("ATOM", serial++, a.name, r.res_name, c.id, r.key.seq_index, a.coords,
                             std::string(posebench::chem::element_symbol(a.element)));
  for (const auto* grp : {&s.cofactors.organic, &s.cofactors.inorganic, &s.cofactors.water})
    for (const auto& r : *grp)
      for (const auto& a : r.atoms)
        out += pdb_atom_line("HETATM", serial++, a.name, r.res_name, r.key.chain_id, r.key.seq_index, a.coords,
                             std::string(posebench::chem::element_symbol(a.element)));
  return out + "END\n";
}

inline void write_file(const std::filesystem::path& p, const std::string& text) { posebench::harness::write_text(p, text); }

}  // namespace fixtures
