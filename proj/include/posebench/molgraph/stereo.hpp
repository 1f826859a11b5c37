#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Geometry>

#include "posebench/molgraph/graph.hpp"
#include "posebench/molgraph/isomorphism.hpp"
#include "posebench/molgraph/rings.hpp"
#include "posebench/vec3.hpp"

namespace posebench::molgraph {

// Below this normalised volume a neighbour tetrahedron is treated as flat
// and no parity is assigned.
inline constexpr double kFlatTetrahedron = 0.05;

inline bool has_multiple_bond(const MolecularGraph& g, int i) {
  for (const auto& nb : g.neighbors(i))
    if (g.bond(nb.bond).order != BondOrder::single) return true;
  return false;
}

// sp3 centre with four distinguishable substituents (at most one hydrogen).
// Distinguishability uses refined colours, so constitutionally equivalent
// branches (two methyls, symmetric ring arms) disqualify the atom.
inline bool is_tetrahedral_stereocenter(const MolecularGraph& g, int i, const std::vector<int>& colors) {
  const auto& a = g.atom(i);
  const bool carbon_like = a.element == 6 || a.element == 14 || a.element == 32;
  const bool onium = (a.element == 7 || a.element == 15) && a.formal_charge == 1 && g.degree(i) == 4;
  if (!carbon_like && !onium) return false;
  if (has_multiple_bond(g, i)) return false;
  if (g.degree(i) + a.hydrogens != 4 || a.hydrogens > 1 || g.degree(i) < 3) return false;
  std::vector<int> nc;
  for (const auto& nb : g.neighbors(i)) nc.push_back(colors[static_cast<std::size_t>(nb.atom)]);
  std::sort(nc.begin(), nc.end());
  return std::adjacent_find(nc.begin(), nc.end()) == nc.end();
}

// Signed volume of the neighbour tetrahedron of `center`. `neighbors` must
// be given in the reference order; with three neighbours the centre itself
// replaces the implicit hydrogen. Returns the volume divided by the product
// of the three edge lengths so the flatness threshold is scale free.
inline double normalized_chiral_volume(const Vec3& center, const std::vector<Vec3>& neighbors) {
  Vec3 e1, e2, e3;
  if (neighbors.size() == 4) {
    e1 = neighbors[1] - neighbors[0];
    e2 = neighbors[2] - neighbors[0];
    e3 = neighbors[3] - neighbors[0];
  } else if (neighbors.size() == 3) {
    e1 = neighbors[0] - center;
    e2 = neighbors[1] - center;
    e3 = neighbors[2] - center;
  } else {
    return 0.0;
  }
  const double scale = e1.norm() * e2.norm() * e3.norm();
  if (scale <= 0.0) return 0.0;
  return e1.dot(e2.cross(e3)) / scale;
}

// Parity of `center` in `coords` using the neighbours of `center` in graph
// `g`, in ascending index order, each sent through `map` (identity when
// empty) before looking up coordinates.
inline std::optional<int> tetrahedral_parity(const MolecularGraph& g, int center, const Coords& coords,
                                             const std::vector<int>& map = {}) {
  auto at = [&](int i) -> const Vec3& { return coords.at(static_cast<std::size_t>(map.empty() ? i : map[static_cast<std::size_t>(i)])); };
  std::vector<Vec3> pts;
  for (const auto& nb : g.neighbors(center)) pts.push_back(at(nb.atom));
  const double v = normalized_chiral_volume(at(center), pts);
  if (std::abs(v) < kFlatTetrahedron) return std::nullopt;
  return v > 0 ? 1 : -1;
}

inline double dihedral_degrees(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  const Vec3 b0 = p1 - p0, b1 = p2 - p1, b2 = p3 - p2;
  const Vec3 n1 = b0.cross(b1), n2 = b1.cross(b2);
  const Vec3 m1 = n1.cross(b1.normalized());
  const double x = n1.dot(n2), y = m1.dot(n2);
  return std::atan2(y, x) * 180.0 / M_PI;
}

inline std::vector<int> ring_membership_min_size(const MolecularGraph& g, const std::vector<Ring>& rings) {
  std::vector<int> best(g.bonds().size(), 0);
  for (const auto& r : rings)
    for (std::size_t i = 0; i < r.size(); ++i) {
      auto k = g.bond_between(r[i], r[(i + 1) % r.size()]);
      auto& slot = best[static_cast<std::size_t>(*k)];
      if (slot == 0 || static_cast<int>(r.size()) < slot) slot = static_cast<int>(r.size());
    }
  return best;
}

// Double bond whose cis/trans configuration is meaningful: acyclic or in a
// ring of eight or more, one or two heavy substituents on each end, and the
// two substituents on an end (if present) distinguishable.
inline bool is_stereo_double_bond(const MolecularGraph& g, int k, const std::vector<int>& colors,
                                  const std::vector<int>& bond_ring_size) {
  const auto& b = g.bond(k);
  if (b.order != BondOrder::double_bond) return false;
  const int rs = bond_ring_size[static_cast<std::size_t>(k)];
  if (rs != 0 && rs < 8) return false;
  for (int end : {b.a, b.b}) {
    const int other = end == b.a ? b.b : b.a;
    std::vector<int> subs;
    for (const auto& nb : g.neighbors(end)) {
      if (nb.atom == other) continue;
      if (g.bond(nb.bond).order == BondOrder::double_bond || g.bond(nb.bond).order == BondOrder::triple) return false;
      subs.push_back(colors[static_cast<std::size_t>(nb.atom)]);
    }
    if (subs.empty() || subs.size() > 2) return false;
    if (subs.size() == 1 && g.atom(end).hydrogens > 1) return false;
    if (subs.size() == 2 && subs[0] == subs[1]) return false;
  }
  return true;
}

inline int lowest_substituent(const MolecularGraph& g, int end, int other) {
  int best = -1;
  for (const auto& nb : g.neighbors(end))
    if (nb.atom != other && (best < 0 || nb.atom < best)) best = nb.atom;
  return best;
}

// Assigns tetrahedral parities and double-bond configurations read from 3D
// coordinates. Only centres selected by `center_filter` (all perceived
// stereocentres when empty) receive a parity.
inline void assign_stereo_from_coords(MolecularGraph& g, const Coords& coords,
                                      const std::vector<bool>& center_filter = {}) {
  const auto colors = refine_colors(g);
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    std::optional<int> parity;
    const bool wanted = center_filter.empty() || center_filter[static_cast<std::size_t>(i)];
    if (wanted && is_tetrahedral_stereocenter(g, i, colors)) parity = tetrahedral_parity(g, i, coords);
    g.set_parity(i, parity);
  }
  const auto rings = perceive_rings(g);
  const auto ring_size = ring_membership_min_size(g, rings);
  for (int k = 0; k < static_cast<int>(g.bonds().size()); ++k) {
    std::optional<DoubleBondStereo> st;
    if (is_stereo_double_bond(g, k, colors, ring_size)) {
      const auto& b = g.bond(k);
      DoubleBondStereo s;
      s.ref_a = lowest_substituent(g, b.a, b.b);
      s.ref_b = lowest_substituent(g, b.b, b.a);
      const double dih = dihedral_degrees(coords[static_cast<std::size_t>(s.ref_a)], coords[static_cast<std::size_t>(b.a)],
                                          coords[static_cast<std::size_t>(b.b)], coords[static_cast<std::size_t>(s.ref_b)]);
      s.config = std::abs(dih) < 90.0 ? DoubleBondConfig::cis : DoubleBondConfig::trans;
      st = s;
    }
    g.set_bond_stereo(k, st);
  }
}

}  // namespace posebench::molgraph
