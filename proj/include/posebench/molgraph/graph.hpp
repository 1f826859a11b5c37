#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "posebench/chem/elements.hpp"
#include "posebench/error.hpp"

namespace posebench::molgraph {

using chem::AtomicNumber;

enum class BondOrder : std::uint8_t { single = 1, double_bond = 2, triple = 3, aromatic = 4 };

// Contribution to an atom's valence. Aromatic bonds count 1.5.
inline double bond_valence(BondOrder o) {
  switch (o) {
    case BondOrder::single: return 1.0;
    case BondOrder::double_bond: return 2.0;
    case BondOrder::triple: return 3.0;
    case BondOrder::aromatic: return 1.5;
  }
  return 1.0;
}

enum class DoubleBondConfig : std::uint8_t { cis, trans };

// Cis/trans configuration of a double bond a=b, expressed relative to one
// reference substituent on each end (ref_a bonded to a, ref_b bonded to b).
struct DoubleBondStereo {
  int ref_a = -1;
  int ref_b = -1;
  DoubleBondConfig config = DoubleBondConfig::trans;
  bool operator==(const DoubleBondStereo&) const = default;
};

struct Atom {
  AtomicNumber element = 0;
  int formal_charge = 0;
  // Attached hydrogens: explicit ones folded in at parse time plus implicit
  // ones from the valence table.
  int hydrogens = 0;
  // Sign of the signed volume of the neighbour tetrahedron, neighbours taken
  // in ascending atom-index order (the atom itself stands in for an implicit
  // hydrogen). Present only for perceived stereocentres.
  std::optional<int> parity;
  bool operator==(const Atom&) const = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::single;
  std::optional<DoubleBondStereo> stereo;
  bool operator==(const Bond&) const = default;
};

struct Neighbor {
  int atom;
  int bond;
};

// Heavy-atom molecular graph. Simple (no self loops or duplicate bonds),
// endpoints always valid. Disconnected input is accepted and flagged via
// multi_fragment().
class MolecularGraph {
 public:
  MolecularGraph() = default;

  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
      : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
    adjacency_.assign(atoms_.size(), {});
    for (std::size_t k = 0; k < bonds_.size(); ++k) {
      const auto& b = bonds_[k];
      const int n = static_cast<int>(atoms_.size());
      if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n)
        throw TopologyError("bond " + std::to_string(k) + " references a missing atom");
      if (b.a == b.b) throw TopologyError("bond " + std::to_string(k) + " is a self loop");
      for (const auto& nb : adjacency_[b.a])
        if (nb.atom == b.b) throw TopologyError("duplicate bond between atoms " + std::to_string(b.a) +
                                                " and " + std::to_string(b.b));
      adjacency_[b.a].push_back({b.b, static_cast<int>(k)});
      adjacency_[b.b].push_back({b.a, static_cast<int>(k)});
    }
    for (auto& adj : adjacency_)
      std::sort(adj.begin(), adj.end(), [](const Neighbor& x, const Neighbor& y) { return x.atom < y.atom; });
    component_ = compute_components();
  }

  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_.at(static_cast<std::size_t>(i)); }
  const Bond& bond(int k) const { return bonds_.at(static_cast<std::size_t>(k)); }
  std::span<const Neighbor> neighbors(int i) const { return adjacency_.at(static_cast<std::size_t>(i)); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(static_cast<std::size_t>(i)).size()); }

  std::optional<int> bond_between(int i, int j) const {
    for (const auto& nb : neighbors(i))
      if (nb.atom == j) return nb.bond;
    return std::nullopt;
  }

  int fragment_count() const {
    return component_.empty() ? 0 : 1 + *std::max_element(component_.begin(), component_.end());
  }
  bool multi_fragment() const { return fragment_count() > 1; }
  int component_of(int i) const { return component_[static_cast<std::size_t>(i)]; }

  // Stereo annotations are attached after construction by the perception
  // pass; topology never changes.
  void set_parity(int i, std::optional<int> parity) { atoms_.at(static_cast<std::size_t>(i)).parity = parity; }
  void set_bond_stereo(int k, std::optional<DoubleBondStereo> s) { bonds_.at(static_cast<std::size_t>(k)).stereo = s; }
  void set_hydrogens(int i, int h) { atoms_.at(static_cast<std::size_t>(i)).hydrogens = h; }

  bool operator==(const MolecularGraph& o) const { return atoms_ == o.atoms_ && bonds_ == o.bonds_; }

 private:
  std::vector<int> compute_components() const {
    std::vector<int> comp(atoms_.size(), -1);
    int next = 0;
    for (std::size_t s = 0; s < atoms_.size(); ++s) {
      if (comp[s] >= 0) continue;
      std::queue<int> q;
      q.push(static_cast<int>(s));
      comp[s] = next;
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& nb : adjacency_[static_cast<std::size_t>(v)])
          if (comp[static_cast<std::size_t>(nb.atom)] < 0) {
            comp[static_cast<std::size_t>(nb.atom)] = next;
            q.push(nb.atom);
          }
      }
      ++next;
    }
    return comp;
  }

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<int> component_;
};

// Sum of bond valences to heavy neighbours, aromatic contributions floored
// (a fused aromatic carbon has 4.5 -> 4).
inline int heavy_valence(const MolecularGraph& g, int i) {
  double sum = 0.0;
  for (const auto& nb : g.neighbors(i)) sum += bond_valence(g.bond(nb.bond).order);
  return static_cast<int>(std::floor(sum + 1e-9));
}

// Hydrogens implied by the valence table for an atom carrying
// `explicit_h` already-known hydrogens.
inline int implicit_hydrogens(const MolecularGraph& g, int i, int explicit_h) {
  const auto& a = g.atom(i);
  auto allowed = chem::allowed_valences(a.element, a.formal_charge);
  if (allowed.empty()) return 0;
  const int used = heavy_valence(g, i) + explicit_h;
  for (int v : allowed)
    if (v >= used) return v - used;
  return 0;
}

// Valence table satisfied: heavy-atom bonds plus hydrogens never exceed the
// largest allowed valence. Atoms outside the organic subset always pass.
inline bool valence_ok(const MolecularGraph& g, int i) {
  const auto& a = g.atom(i);
  auto allowed = chem::allowed_valences(a.element, a.formal_charge);
  if (allowed.empty()) return true;
  return heavy_valence(g, i) + a.hydrogens <= allowed.back();
}

// Hill-order formula including hydrogens ("C2H6O").
inline std::string molecular_formula(const MolecularGraph& g) {
  std::map<std::string, int> counts;
  int h = 0;
  for (const auto& a : g.atoms()) {
    if (chem::is_hydrogen(a.element))
      ++h;
    else
      ++counts[std::string(chem::element_symbol(a.element))];
    h += a.hydrogens;
  }
  if (h) counts["H"] += h;
  std::string out;
  auto emit = [&](const std::string& sym) {
    auto it = counts.find(sym);
    if (it == counts.end()) return;
    out += sym;
    if (it->second != 1) out += std::to_string(it->second);
    counts.erase(it);
  };
  if (counts.count("C")) {
    emit("C");
    emit("H");
  }
  for (const auto& [sym, n] : counts) {
    out += sym;
    if (n != 1) out += std::to_string(n);
  }
  return out;
}

// All-pairs bond-path distances (BFS); -1 between fragments.
inline std::vector<std::vector<int>> topological_distances(const MolecularGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    auto& row = d[s];
    std::queue<int> q;
    row[s] = 0;
    q.push(static_cast<int>(s));
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& nb : g.neighbors(v))
        if (row[static_cast<std::size_t>(nb.atom)] < 0) {
          row[static_cast<std::size_t>(nb.atom)] = row[static_cast<std::size_t>(v)] + 1;
          q.push(nb.atom);
        }
    }
  }
  return d;
}

}  // namespace posebench::molgraph
