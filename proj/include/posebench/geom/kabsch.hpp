#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "posebench/error.hpp"
#include "posebench/vec3.hpp"

namespace posebench::geom {

struct Superposition {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double rmsd = 0.0;

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  Coords apply(const Coords& xs) const {
    Coords out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(apply(x));
    return out;
  }
};

namespace detail {

inline Vec3 weighted_centroid(const Coords& x, std::span<const double> w, double wsum) {
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) c += w[i] * x[i];
  return c / wsum;
}

// Rejects point sets whose centred scatter has rank < 2.
inline void require_spread(const Coords& x, const Vec3& c, const char* which) {
  Mat3 s = Mat3::Zero();
  for (const auto& p : x) s += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(s);
  const auto ev = es.eigenvalues();  // ascending
  const double top = ev(2);
  if (!(top > 1e-12) || ev(1) <= 1e-10 * top)
    throw DegenerateGeometryError(std::string(which) + " points are coincident or collinear");
}

}  // namespace detail

// Proper rotation R and translation t minimising the weighted RMSD between
// R*Q + t and P.
inline Superposition kabsch(const Coords& P, const Coords& Q, std::span<const double> weights = {}) {
  if (P.size() != Q.size()) throw InvalidArgument("kabsch: point sets differ in size");
  if (P.size() < 3) throw DegenerateGeometryError("kabsch: need at least 3 points");
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(P.size(), 1.0);
    weights = unit;
  }
  if (weights.size() != P.size()) throw InvalidArgument("kabsch: weight count differs from point count");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("kabsch: weights must be finite and nonnegative");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw InvalidArgument("kabsch: weights sum to zero");

  const Vec3 pc = detail::weighted_centroid(P, weights, wsum);
  const Vec3 qc = detail::weighted_centroid(Q, weights, wsum);
  detail::require_spread(P, pc, "reference");
  detail::require_spread(Q, qc, "mobile");

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < P.size(); ++i) h += weights[i] * (Q[i] - qc) * (P[i] - pc).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  Superposition s;
  s.rotation = v * d * u.transpose();
  s.translation = pc - s.rotation * qc;
  double sq = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) sq += weights[i] * (s.apply(Q[i]) - P[i]).squaredNorm();
  s.rmsd = std::sqrt(sq / wsum);
  return s;
}

inline double rmsd(const Coords& a, const Coords& b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("rmsd: coordinate lists must be nonempty and equal length");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sq / static_cast<double>(a.size()));
}

}  // namespace posebench::geom
