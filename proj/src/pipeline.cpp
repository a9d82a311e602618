#include "rrbfpu/pipeline.hpp"

namespace rrbfpu {

AugmentedDataset prepare_dataset(const PointSet& points,
                                 const std::optional<Points3>& normals,
                                 const PipelineConfig& config) {
  OrientedNormals oriented;
  if (normals && normals->cols() == points.count()) {
    oriented.normals = *normals;
    oriented.degenerate_mask.assign(points.count(), false);
    for (Eigen::Index i = 0; i < points.count(); ++i) {
      const double len = oriented.normals.col(i).norm();
      if (len < 1e-12) {
        oriented.degenerate_mask[i] = true;
        oriented.normals.col(i).setZero();
      } else {
        oriented.normals.col(i) /= len;
      }
    }
  } else {
    oriented = estimate_normals(points, config.normal_opts);
  }

  AugmentOptions aug;
  aug.xi = config.xi;
  aug.domain = Box::cube(config.gamma);
  return make_offsurface(points, oriented, config.levels, aug);
}

PUInterpolant fit_interpolant(const AugmentedDataset& data,
                              const PipelineConfig& config) {
  Covering covering = build_covering(config.gamma, data.nodes.count());
  return fit_pu(data, std::move(covering), config.kernel, config.method,
                config.pu);
}

ReconstructionResult reconstruct(const PointSet& points,
                                 const std::optional<Points3>& normals,
                                 const PipelineConfig& config) {
  ReconstructionResult result;
  result.data = prepare_dataset(points, normals, config);
  result.interpolant = fit_interpolant(result.data, config);
  result.field = eval_grid(result.interpolant, Box::cube(config.gamma),
                           config.grid_resolution);
  result.mesh = marching_cubes(result.field, config.levels.a);
  return result;
}

}  // namespace rrbfpu
