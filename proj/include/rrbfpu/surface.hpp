#pragma once

#include <array>
#include <vector>

#include "rrbfpu/pu.hpp"
#include "rrbfpu/types.hpp"

namespace rrbfpu {

/// Scalar samples on a regular grid over a box.
struct ScalarField {
  Box box;
  std::array<int, 3> resolution{80, 80, 80};
  std::vector<double> values;  // x fastest, then y, then z

  double& at(int i, int j, int k) {
    return values[(static_cast<std::size_t>(k) * resolution[1] + j) *
                      resolution[0] + i];
  }
  double at(int i, int j, int k) const {
    return values[(static_cast<std::size_t>(k) * resolution[1] + j) *
                      resolution[0] + i];
  }
  Vec3 grid_point(int i, int j, int k) const {
    const Vec3 e = box.extent();
    return box.lo + Vec3(e.x() * i / (resolution[0] - 1),
                         e.y() * j / (resolution[1] - 1),
                         e.z() * k / (resolution[2] - 1));
  }
  Vec3 spacing() const {
    const Vec3 e = box.extent();
    return {e.x() / (resolution[0] - 1), e.y() / (resolution[1] - 1),
            e.z() / (resolution[2] - 1)};
  }
};

struct IsoMesh {
  Points3 vertices;
  std::vector<std::array<Eigen::Index, 3>> triangles;
  double level{0.0};
};

struct MeshStats {
  Eigen::Index vertex_count{0};
  Eigen::Index triangle_count{0};
  Box bounding_box;
  Eigen::Index boundary_edge_count{0};
};

/// Samples the PU interpolant on the grid; parallel over z-slabs with
/// deterministic output.
ScalarField eval_grid(const PUInterpolant& interp, const Box& box,
                      const std::array<int, 3>& resolution);

/// Samples an arbitrary scalar function on the grid.
template <typename F>
ScalarField eval_grid_fn(F&& f, const Box& box,
                         const std::array<int, 3>& resolution) {
  ScalarField field;
  field.box = box;
  field.resolution = resolution;
  field.values.resize(static_cast<std::size_t>(resolution[0]) * resolution[1] *
                      resolution[2]);
  for (int k = 0; k < resolution[2]; ++k)
    for (int j = 0; j < resolution[1]; ++j)
      for (int i = 0; i < resolution[0]; ++i)
        field.at(i, j, k) = f(field.grid_point(i, j, k));
  return field;
}

/// Standard 256-case marching cubes with linear edge interpolation and
/// vertex sharing via global edge keys. Returns an empty mesh (with a
/// warning on stderr) when the level is outside the field range.
IsoMesh marching_cubes(const ScalarField& field, double level);

MeshStats mesh_stats(const IsoMesh& mesh);

}  // namespace rrbfpu
