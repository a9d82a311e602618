#pragma once

#include <vector>

#include "rrbfpu/normals.hpp"
#include "rrbfpu/types.hpp"

namespace rrbfpu {

/// Level values assigned to surface / outside / inside nodes.
struct LevelValues {
  double a{2.0};  // on-surface; the iso-surface is extracted at this level
  double b{3.0};  // outside, at +delta along the normal
  double c{1.0};  // inside, at -delta

  static LevelValues rational_defaults() { return {2.0, 3.0, 1.0}; }
  static LevelValues classic() { return {0.0, 1.0, -1.0}; }
};

enum class NodeOrigin { Surface, Plus, Minus };

/// Surface nodes plus off-surface companions with their level values.
struct AugmentedDataset {
  PointSet nodes;
  Eigen::VectorXd values;
  std::vector<NodeOrigin> origin;
  double delta{0.0};
  LevelValues levels;
  Eigen::Index surface_count{0};  // surface nodes come first
};

struct AugmentOptions {
  double xi{1.0 / 3.0};
  Box domain{Box::cube(1.0)};
  // Forces delta instead of xi * separation distance when positive.
  double forced_delta{0.0};
};

/// Adds x_i +- delta * n_i with values b and c for every non-degenerate
/// point; off-surface nodes outside the domain are dropped.
AugmentedDataset make_offsurface(const PointSet& points,
                                 const OrientedNormals& normals,
                                 const LevelValues& levels,
                                 const AugmentOptions& opts);

}  // namespace rrbfpu
