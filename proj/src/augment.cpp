#include "rrbfpu/augment.hpp"

#include <cmath>
#include <iostream>

#include "rrbfpu/spatial.hpp"

namespace rrbfpu {

AugmentedDataset make_offsurface(const PointSet& points,
                                 const OrientedNormals& normals,
                                 const LevelValues& levels,
                                 const AugmentOptions& opts) {
  const Eigen::Index n = points.count();
  if (levels.a == levels.b || levels.a == levels.c || levels.b == levels.c)
    throw Error("make_offsurface: level values must be pairwise distinct");
  if (!(opts.xi > 0.0))
    throw Error("make_offsurface: xi must be positive");
  if (opts.xi > 1.0 / 3.0 + 1e-15)
    std::cerr << "warning: xi > 1/3 may place off-surface points too close "
                 "to each other\n";

  bool any_normal = false;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!normals.degenerate_mask[i]) any_normal = true;
  if (!any_normal) throw Error("make_offsurface: all normals degenerate");

  double delta = opts.forced_delta;
  if (!(delta > 0.0)) {
    const double q = separation_distance(points);
    if (!(q > 0.0)) throw Error("make_offsurface: duplicate points (separation 0)");
    delta = opts.xi * q;
  }

  std::vector<Vec3> plus, minus;
  plus.reserve(n);
  minus.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (normals.degenerate_mask[i]) continue;
    const Vec3 ni = normals.normals.col(i);
    const Vec3 xp = points.point(i) + delta * ni;
    const Vec3 xm = points.point(i) - delta * ni;
    // A companion outside the domain would misstate the signed level; the
    // pair is dropped together so midpoints stay on the surface node.
    if (opts.domain.contains(xp) && opts.domain.contains(xm)) {
      plus.push_back(xp);
      minus.push_back(xm);
    }
  }

  AugmentedDataset data;
  data.delta = delta;
  data.levels = levels;
  data.surface_count = n;
  const Eigen::Index total = n + static_cast<Eigen::Index>(plus.size() + minus.size());
  data.nodes.coords.resize(3, total);
  data.values.resize(total);
  data.origin.resize(total);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.nodes.coords.col(i) = points.point(i);
    data.values(i) = levels.a;
    data.origin[i] = NodeOrigin::Surface;
  }
  Eigen::Index c = n;
  for (const Vec3& x : plus) {
    data.nodes.coords.col(c) = x;
    data.values(c) = levels.b;
    data.origin[c] = NodeOrigin::Plus;
    ++c;
  }
  for (const Vec3& x : minus) {
    data.nodes.coords.col(c) = x;
    data.values(c) = levels.c;
    data.origin[c] = NodeOrigin::Minus;
    ++c;
  }
  return data;
}

}  // namespace rrbfpu
