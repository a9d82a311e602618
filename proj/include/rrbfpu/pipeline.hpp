#pragma once

#include <optional>

#include "rrbfpu/augment.hpp"
#include "rrbfpu/io.hpp"
#include "rrbfpu/normals.hpp"
#include "rrbfpu/pu.hpp"
#include "rrbfpu/surface.hpp"

namespace rrbfpu {

/// End-to-end reconstruction parameters. Defaults follow the bench setup:
/// unit cube domain, level values (2, 3, 1), xi = 1/3, K = 10, 80^3 grid.
struct PipelineConfig {
  Method method{Method::RRBF};
  KernelSpec kernel{KernelFamily::WendlandC2, 1.0};
  LevelValues levels{LevelValues::rational_defaults()};
  double gamma{1.0};
  double xi{1.0 / 3.0};
  NormalOptions normal_opts;
  std::array<int, 3> grid_resolution{80, 80, 80};
  PUOptions pu;
};

/// Normals (estimated when absent) -> off-surface augmentation.
AugmentedDataset prepare_dataset(const PointSet& points,
                                 const std::optional<Points3>& normals,
                                 const PipelineConfig& config);

/// Covering + per-patch fits for an augmented dataset.
PUInterpolant fit_interpolant(const AugmentedDataset& data,
                              const PipelineConfig& config);

struct ReconstructionResult {
  AugmentedDataset data;
  PUInterpolant interpolant;
  ScalarField field;
  IsoMesh mesh;
};

/// Full pipeline: augment, fit, sample the grid, extract the level-a mesh.
ReconstructionResult reconstruct(const PointSet& points,
                                 const std::optional<Points3>& normals,
                                 const PipelineConfig& config);

}  // namespace rrbfpu
