#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "posebench/chem/elements.hpp"
#include "posebench/molgraph/graph.hpp"
#include "posebench/molgraph/rings.hpp"
#include "posebench/validity/report.hpp"
#include "posebench/vec3.hpp"

namespace posebench::validity {

using chem::RadiiTable;
using molgraph::BondOrder;
using molgraph::MolecularGraph;

inline constexpr double kSp3Angle = 109.47;
inline constexpr double kSp2Angle = 120.0;
inline constexpr double kSpAngle = 180.0;

inline double angle_degrees(const Vec3& a, const Vec3& center, const Vec3& b) {
  const Vec3 u = a - center, v = b - center;
  const double c = u.dot(v) / (u.norm() * v.norm());
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
}

// Ideal valence angle at atom i from its bond orders: four or more
// substituents (counting hydrogens) -> sp3, a triple bond or two double
// bonds -> sp, any double or aromatic bond -> sp2, else sp3.
inline double ideal_angle(const MolecularGraph& g, int i) {
  if (g.degree(i) + g.atom(i).hydrogens >= 4) return kSp3Angle;
  int doubles = 0;
  bool triple = false, unsat = false;
  for (const auto& nb : g.neighbors(i)) {
    const auto o = g.bond(nb.bond).order;
    if (o == BondOrder::triple) triple = true;
    if (o == BondOrder::double_bond) ++doubles;
    if (o != BondOrder::single) unsat = true;
  }
  if (triple || doubles >= 2) return kSpAngle;
  return unsat ? kSp2Angle : kSp3Angle;
}

struct AngleTerm {
  int a, center, b;
  double ideal;
};

// Every bonded angle a-center-b (a < b) at centres with at most four heavy
// neighbours. Angles inside three- and four-membered rings take 60 and 90
// degrees as ideal.
inline std::vector<AngleTerm> angle_terms(const MolecularGraph& g, const std::vector<molgraph::Ring>& rings) {
  std::map<std::tuple<int, int, int>, double> small_ring;
  for (const auto& r : rings) {
    if (r.size() != 3 && r.size() != 4) continue;
    const double ideal = r.size() == 3 ? 60.0 : 90.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      int c = r[k], x = r[(k + r.size() - 1) % r.size()], y = r[(k + 1) % r.size()];
      if (x > y) std::swap(x, y);
      auto [it, fresh] = small_ring.emplace(std::make_tuple(x, c, y), ideal);
      if (!fresh) it->second = std::min(it->second, ideal);
    }
  }
  std::vector<AngleTerm> out;
  for (int c = 0; c < static_cast<int>(g.size()); ++c) {
    const auto& nbs = g.neighbors(c);
    if (nbs.size() < 2 || nbs.size() > 4) continue;
    const double base = ideal_angle(g, c);
    for (std::size_t p = 0; p < nbs.size(); ++p)
      for (std::size_t q = p + 1; q < nbs.size(); ++q) {
        int a = std::min(nbs[p].atom, nbs[q].atom), b = std::max(nbs[p].atom, nbs[q].atom);
        auto it = small_ring.find({a, c, b});
        out.push_back({a, c, b, it == small_ring.end() ? base : it->second});
      }
  }
  return out;
}

// Largest distance of any point from the least-squares plane through all
// of them (zero for three or fewer points).
inline double max_plane_deviation(const Coords& pts) {
  if (pts.size() <= 3) return 0.0;
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 n = es.eigenvectors().col(0);
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, std::abs((p - c).dot(n)));
  return worst;
}

inline std::string atom_label(const MolecularGraph& g, int i) {
  return std::string(chem::element_symbol(g.atom(i).element)) + std::to_string(i + 1);
}

// ---------------------------------------------------------------------------
// Strain functional used by internal_energy: harmonic bond stretch around an
// order-scaled covalent length, harmonic angle bend around the ideal angles
// above, and a purely repulsive (WCA-truncated 12-6) term for atom pairs at
// least `min_separation` bonds apart.

struct StrainParams {
  double k_bond = 100.0;     // per A^2
  double k_angle = 0.02;     // per degree^2
  double epsilon = 0.2;
  double contact_scale = 0.8;  // WCA cutoff as a fraction of the vdW sum
  int min_separation = 4;
};

inline double bond_length_scale(BondOrder o) {
  switch (o) {
    case BondOrder::single: return 1.0;
    case BondOrder::aromatic: return 0.91;
    case BondOrder::double_bond: return 0.87;
    case BondOrder::triple: return 0.78;
  }
  return 1.0;
}

struct StrainEnergy {
  double bonds = 0.0;
  double angles = 0.0;
  double nonbonded = 0.0;
  double total() const { return bonds + angles + nonbonded; }
};

inline StrainEnergy strain_energy(const MolecularGraph& g, const Coords& xyz, const RadiiTable& radii,
                                  const StrainParams& p = {}) {
  StrainEnergy e;
  for (const auto& b : g.bonds()) {
    const double ideal = (radii.covalent(g.atom(b.a).element) + radii.covalent(g.atom(b.b).element)) * bond_length_scale(b.order);
    const double d = distance(xyz[static_cast<std::size_t>(b.a)], xyz[static_cast<std::size_t>(b.b)]);
    e.bonds += p.k_bond * (d - ideal) * (d - ideal);
  }
  for (const auto& t : angle_terms(g, molgraph::perceive_rings(g))) {
    const double th = angle_degrees(xyz[static_cast<std::size_t>(t.a)], xyz[static_cast<std::size_t>(t.center)],
                                    xyz[static_cast<std::size_t>(t.b)]);
    e.angles += p.k_angle * (th - t.ideal) * (th - t.ideal);
  }
  const auto topo = molgraph::topological_distances(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const int sep = topo[i][j];
      if (sep >= 0 && sep < p.min_separation) continue;
      const double rmin = p.contact_scale * (radii.vdw(g.atom(static_cast<int>(i)).element) + radii.vdw(g.atom(static_cast<int>(j)).element));
      const double r = distance(xyz[i], xyz[j]);
      if (r >= rmin) continue;
      const double sr6 = std::pow(rmin / std::max(r, 1e-3), 6) / 2.0;  // (sigma/r)^6 with rmin = 2^(1/6) sigma
      e.nonbonded += 4.0 * p.epsilon * (sr6 * sr6 - sr6) + p.epsilon;
    }
  return e;
}

// ---------------------------------------------------------------------------

// bond_lengths, bond_angles, internal_steric_clash, aromatic_ring_flatness,
// double_bond_flatness and internal_energy. `reference` is an optional
// low-energy conformer (its own graph and coordinates) for internal_energy.
inline CheckReport check_geometry(const MolecularGraph& g, const Coords& xyz, const CheckConfig& cfg = {},
                                  const RadiiTable& radii = RadiiTable::builtin(),
                                  const MolecularGraph* ref_graph = nullptr, const Coords* ref_xyz = nullptr) {
  if (xyz.size() != g.size()) throw InvalidArgument("coordinate count differs from atom count");
  CheckReport rep;
  auto at = [&](int i) -> const Vec3& { return xyz[static_cast<std::size_t>(i)]; };

  {
    double worst = 0.0;
    std::string where;
    for (const auto& b : g.bonds()) {
      const double ideal = radii.covalent(g.atom(b.a).element) + radii.covalent(g.atom(b.b).element);
      const double dev = std::abs(distance(at(b.a), at(b.b)) / ideal - 1.0);
      if (dev > worst) {
        worst = dev;
        where = atom_label(g, b.a) + "-" + atom_label(g, b.b);
      }
    }
    rep.set("bond_lengths", worst <= cfg.bond_len_rel_tol, worst,
            where.empty() ? "max relative deviation" : "max relative deviation at " + where);
  }

  const auto rings = molgraph::perceive_rings(g);
  {
    double worst = 0.0;
    std::string where;
    for (const auto& t : angle_terms(g, rings)) {
      const double dev = std::abs(angle_degrees(at(t.a), at(t.center), at(t.b)) / t.ideal - 1.0);
      if (dev > worst) {
        worst = dev;
        where = atom_label(g, t.a) + "-" + atom_label(g, t.center) + "-" + atom_label(g, t.b);
      }
    }
    rep.set("bond_angles", worst <= cfg.angle_rel_tol, worst,
            where.empty() ? "max relative deviation" : "max relative deviation at " + where);
  }

  {
    const auto topo = molgraph::topological_distances(g);
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const int sep = topo[i][j];
        if (sep >= 0 && sep < cfg.clash_min_separation) continue;
        const double lim = radii.vdw(g.atom(static_cast<int>(i)).element) + radii.vdw(g.atom(static_cast<int>(j)).element);
        const double ratio = distance(xyz[i], xyz[j]) / lim;
        if (ratio < worst) {
          worst = ratio;
          where = atom_label(g, static_cast<int>(i)) + "/" + atom_label(g, static_cast<int>(j));
        }
      }
    if (std::isinf(worst))
      rep.set("internal_steric_clash", true, std::nullopt, "no atom pairs separated by enough bonds");
    else
      rep.set("internal_steric_clash", worst >= cfg.clash_vdw_factor, worst, "min distance / vdW sum at " + where);
  }

  {
    double worst = 0.0;
    int n = 0;
    for (const auto& r : rings) {
      if (r.size() != 5 && r.size() != 6) continue;
      bool aromatic = true;
      for (std::size_t k = 0; k < r.size() && aromatic; ++k)
        aromatic = g.bond(*g.bond_between(r[k], r[(k + 1) % r.size()])).order == BondOrder::aromatic;
      if (!aromatic) continue;
      Coords pts;
      for (int a : r) pts.push_back(at(a));
      worst = std::max(worst, max_plane_deviation(pts));
      ++n;
    }
    if (n == 0)
      rep.set("aromatic_ring_flatness", true, std::nullopt, "no aromatic 5/6-membered rings");
    else
      rep.set("aromatic_ring_flatness", worst <= cfg.flatness_tol, worst, "max out-of-plane deviation (A)");
  }

  {
    double worst = 0.0;
    int n = 0;
    for (const auto& b : g.bonds()) {
      if (b.order != BondOrder::double_bond) continue;
      Coords pts{at(b.a), at(b.b)};
      bool cumulated = false;
      for (int end : {b.a, b.b})
        for (const auto& nb : g.neighbors(end)) {
          if (nb.atom == b.a || nb.atom == b.b) continue;
          if (g.bond(nb.bond).order == BondOrder::double_bond || g.bond(nb.bond).order == BondOrder::triple) cumulated = true;
          pts.push_back(at(nb.atom));
        }
      if (cumulated || pts.size() < 4) continue;
      worst = std::max(worst, max_plane_deviation(pts));
      ++n;
    }
    if (n == 0)
      rep.set("double_bond_flatness", true, std::nullopt, "no substituted double bonds");
    else
      rep.set("double_bond_flatness", worst <= cfg.flatness_tol, worst, "max out-of-plane deviation (A)");
  }

  {
    StrainParams sp;
    sp.min_separation = cfg.clash_min_separation;
    const double e_pose = strain_energy(g, xyz, radii, sp).total();
    if (!ref_graph || !ref_xyz) {
      rep.set("internal_energy", true, std::nullopt, "skipped: no reference conformer");
    } else {
      const double e_ref = std::max(strain_energy(*ref_graph, *ref_xyz, radii, sp).total(), 1.0);
      const double ratio = e_pose / e_ref;
      rep.set("internal_energy", ratio <= cfg.strain_ratio_max, ratio, "strain ratio pose / reference");
    }
  }
  return rep;
}

}  // namespace posebench::validity
