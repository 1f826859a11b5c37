#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/StdVector>

namespace posebench {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Coords = std::vector<Vec3>;

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

}  // namespace posebench
