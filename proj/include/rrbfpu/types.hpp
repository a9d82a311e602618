#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrbfpu {

using Vec3 = Eigen::Vector3d;
using Points3 = Eigen::Matrix3Xd;  // one point per column

/// Axis-aligned bounding box.
struct Box {
  Vec3 lo{Vec3::Zero()};
  Vec3 hi{Vec3::Ones()};

  Vec3 extent() const { return hi - lo; }
  double half_diagonal() const { return 0.5 * extent().norm(); }
  bool contains(const Vec3& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
  static Box cube(double gamma) { return {Vec3::Zero(), Vec3::Constant(gamma)}; }
};

/// Unorganized set of 3D samples, one per column.
struct PointSet {
  Points3 coords;

  PointSet() = default;
  explicit PointSet(Points3 c) : coords(std::move(c)) {}

  Eigen::Index count() const { return coords.cols(); }
  Vec3 point(Eigen::Index i) const { return coords.col(i); }

  bool all_finite() const { return coords.allFinite(); }
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConditioningError : Error {
  using Error::Error;
};

struct UncoveredPointError : Error {
  using Error::Error;
};

struct DenominatorNearZeroError : Error {
  using Error::Error;
};

struct ZeroFunctionValueError : Error {
  using Error::Error;
};

}  // namespace rrbfpu
