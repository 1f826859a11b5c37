#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "posebench/chem/structure.hpp"
#include "posebench/validity/report.hpp"

namespace posebench::validity {

struct Sphere {
  Vec3 center;
  double radius;
};

// Heavy atoms of one environment group as vdW spheres plus element ids.
struct AtomGroup {
  std::vector<Vec3> xyz;
  std::vector<chem::AtomicNumber> element;
  bool empty() const { return xyz.empty(); }
};

inline AtomGroup group_atoms(const std::vector<chem::ResidueSite>& residues) {
  AtomGroup g;
  for (const auto& r : residues)
    for (const auto& a : r.atoms) {
      g.xyz.push_back(a.coords);
      g.element.push_back(a.element);
    }
  return g;
}

inline AtomGroup protein_group(const chem::ComplexStructure& s) {
  AtomGroup g;
  s.for_each_residue([&](const chem::ResidueSite& r) {
    for (const auto& a : r.atoms) {
      g.xyz.push_back(a.coords);
      g.element.push_back(a.element);
    }
  });
  return g;
}

// Organic cofactors plus every ligand instance other than the target.
inline AtomGroup organic_group(const chem::ComplexStructure& s) {
  AtomGroup g = group_atoms(s.cofactors.organic);
  for (std::size_t i = 0; i < s.ligands.size(); ++i) {
    if (i == s.target_ligand) continue;
    const auto& l = s.ligands[i];
    for (std::size_t k = 0; k < l.coords.size(); ++k) {
      g.xyz.push_back(l.coords[k]);
      g.element.push_back(l.graph.atom(static_cast<int>(k)).element);
    }
  }
  return g;
}

// Orthonormal, right-handed frame attached to a point cloud: origin at the
// centroid, axes along the principal directions, each axis oriented so the
// third moment of the projections is nonnegative. Reduces the dependence of
// grid estimates on the input orientation.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  // rows are the axes
  Vec3 to_local(const Vec3& x) const { return axes * (x - origin); }
};

inline Frame principal_frame(const std::vector<Vec3>& pts) {
  Frame f;
  if (pts.empty()) return f;
  for (const auto& p : pts) f.origin += p;
  f.origin /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) cov += (p - f.origin) * (p - f.origin).transpose();
  if (cov.norm() < 1e-12) return f;
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  Mat3 ax;
  for (int k = 0; k < 3; ++k) {
    Vec3 a = es.eigenvectors().col(2 - k);
    double m3 = 0.0;
    for (const auto& p : pts) m3 += std::pow(a.dot(p - f.origin), 3);
    if (m3 < 0.0) a = -a;
    ax.row(k) = a.transpose();
  }
  if (ax.determinant() < 0.0) ax.row(2) = -ax.row(2);
  f.axes = ax;
  return f;
}

// Fraction of the volume of the union of `ligand` spheres that also lies
// inside the union of `other` spheres, estimated by counting the centres of
// cubic cells of edge `spacing` in the ligand's principal frame.
inline double volume_overlap_fraction(const std::vector<Sphere>& ligand, const std::vector<Sphere>& other, double spacing) {
  if (ligand.empty()) return 0.0;
  if (!(spacing > 0.0)) throw InvalidArgument("grid spacing must be positive");
  std::vector<Vec3> centres;
  for (const auto& s : ligand) centres.push_back(s.center);
  const Frame f = principal_frame(centres);

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  std::vector<Sphere> lig_local;
  for (const auto& s : ligand) {
    const Vec3 c = f.to_local(s.center);
    lig_local.push_back({c, s.radius});
    lo = lo.cwiseMin(c - Vec3::Constant(s.radius));
    hi = hi.cwiseMax(c + Vec3::Constant(s.radius));
  }
  // Cells are centred on a lattice anchored at the frame origin.
  std::array<long, 3> i0{}, n{};
  for (int d = 0; d < 3; ++d) {
    i0[d] = static_cast<long>(std::floor(lo[d] / spacing - 0.5)) - 1;
    const long i1 = static_cast<long>(std::ceil(hi[d] / spacing - 0.5)) + 1;
    n[d] = i1 - i0[d] + 1;
  }
  const std::size_t total = static_cast<std::size_t>(n[0] * n[1] * n[2]);
  std::vector<std::uint8_t> mask(total, 0);
  auto cell_centre = [&](long x, long y, long z) {
    return Vec3((static_cast<double>(i0[0] + x) + 0.5) * spacing, (static_cast<double>(i0[1] + y) + 0.5) * spacing,
                (static_cast<double>(i0[2] + z) + 0.5) * spacing);
  };
  auto paint = [&](const Sphere& s, std::uint8_t bit, bool require_lig) {
    long lo_i[3], hi_i[3];
    for (int d = 0; d < 3; ++d) {
      lo_i[d] = std::max(0L, static_cast<long>(std::floor((s.center[d] - s.radius) / spacing - 0.5)) - i0[d]);
      hi_i[d] = std::min(n[d] - 1, static_cast<long>(std::ceil((s.center[d] + s.radius) / spacing - 0.5)) - i0[d]);
    }
    const double r2 = s.radius * s.radius;
    for (long x = lo_i[0]; x <= hi_i[0]; ++x)
      for (long y = lo_i[1]; y <= hi_i[1]; ++y)
        for (long z = lo_i[2]; z <= hi_i[2]; ++z) {
          auto& m = mask[static_cast<std::size_t>((x * n[1] + y) * n[2] + z)];
          if (require_lig && !(m & 1)) continue;
          if ((cell_centre(x, y, z) - s.center).squaredNorm() <= r2) m |= bit;
        }
  };
  for (const auto& s : lig_local) paint(s, 1, false);
  for (const auto& s : other) {
    Sphere local{f.to_local(s.center), s.radius};
    bool near = true;
    for (int d = 0; d < 3; ++d)
      if (local.center[d] + s.radius < lo[d] || local.center[d] - s.radius > hi[d]) near = false;
    if (near) paint(local, 2, true);
  }
  std::size_t in_lig = 0, in_both = 0;
  for (auto m : mask) {
    in_lig += (m & 1) != 0;
    in_both += m == 3;
  }
  return in_lig == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(in_lig);
}

namespace detail {

inline void min_distance_check(CheckReport& rep, const std::string& name, const chem::LigandInstance& lig,
                               const AtomGroup& grp, const CheckConfig& cfg, const chem::RadiiTable& radii) {
  if (grp.empty()) {
    rep.set(name, true, std::nullopt, "group absent");
    return;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lig.coords.size(); ++i) {
    const double ri = radii.vdw(lig.graph.atom(static_cast<int>(i)).element);
    for (std::size_t j = 0; j < grp.xyz.size(); ++j) {
      const double lim = ri + radii.vdw(grp.element[j]);
      const double d2 = (lig.coords[i] - grp.xyz[j]).squaredNorm();
      if (d2 >= worst * worst * lim * lim) continue;
      worst = std::min(worst, std::sqrt(d2) / lim);
    }
  }
  rep.set(name, worst >= cfg.inter_vdw_factor, worst, "min distance / vdW sum");
}

inline void overlap_check(CheckReport& rep, const std::string& name, const std::vector<Sphere>& lig_spheres,
                          const AtomGroup& grp, const CheckConfig& cfg, const chem::RadiiTable& radii) {
  if (grp.empty()) {
    rep.set(name, true, std::nullopt, "group absent");
    return;
  }
  std::vector<Sphere> other;
  for (std::size_t j = 0; j < grp.xyz.size(); ++j) other.push_back({grp.xyz[j], radii.vdw(grp.element[j])});
  const double frac = volume_overlap_fraction(lig_spheres, other, cfg.grid_spacing);
  rep.set(name, frac <= cfg.volume_overlap_max, frac, "fraction of ligand vdW volume");
}

}  // namespace detail

// Distance and volume-overlap checks of the target ligand against the
// protein, organic cofactors, inorganic cofactors and waters.
inline CheckReport check_environment(const chem::ComplexStructure& pred, const CheckConfig& cfg = {},
                                     const chem::RadiiTable& radii = chem::RadiiTable::builtin()) {
  const auto& lig = pred.ligand();
  const AtomGroup protein = protein_group(pred);
  const AtomGroup organic = organic_group(pred);
  const AtomGroup inorganic = group_atoms(pred.cofactors.inorganic);
  const AtomGroup water = group_atoms(pred.cofactors.water);
  CheckReport rep;

  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& x : lig.coords)
    for (const auto& p : protein.xyz) dmin = std::min(dmin, (x - p).squaredNorm());
  dmin = std::sqrt(dmin);
  if (protein.empty())
    rep.set("protein-ligand_maximum_distance", false, std::nullopt, "no protein atoms");
  else
    rep.set("protein-ligand_maximum_distance", dmin <= cfg.max_lig_prot_dist, dmin, "min ligand-protein distance (A)");

  detail::min_distance_check(rep, "minimum_distance_to_protein", lig, protein, cfg, radii);
  detail::min_distance_check(rep, "minimum_distance_to_organic_cofactors", lig, organic, cfg, radii);
  detail::min_distance_check(rep, "minimum_distance_to_inorganic_cofactors", lig, inorganic, cfg, radii);
  detail::min_distance_check(rep, "minimum_distance_to_waters", lig, water, cfg, radii);

  std::vector<Sphere> lig_spheres;
  for (std::size_t i = 0; i < lig.coords.size(); ++i)
    lig_spheres.push_back({lig.coords[i], radii.vdw(lig.graph.atom(static_cast<int>(i)).element)});
  detail::overlap_check(rep, "volume_overlap_with_protein", lig_spheres, protein, cfg, radii);
  detail::overlap_check(rep, "volume_overlap_with_organic_cofactors", lig_spheres, organic, cfg, radii);
  detail::overlap_check(rep, "volume_overlap_with_inorganic_cofactors", lig_spheres, inorganic, cfg, radii);
  detail::overlap_check(rep, "volume_overlap_with_waters", lig_spheres, water, cfg, radii);
  return rep;
}

}  // namespace posebench::validity
