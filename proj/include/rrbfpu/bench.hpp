#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrbfpu/pipeline.hpp"

namespace rrbfpu {

/// Analytic implicit surface F(x) = 0 with gradient, for sampling and
/// error measurement.
struct TestSurface {
  std::string name;
  std::function<double(const Vec3&)> implicit;
  std::function<Vec3(const Vec3&)> gradient;
  Box domain{Box::cube(1.0)};
};

/// Sphere of radius 0.5 centered at (0.5, 0.5, 0.5).
TestSurface surface_f1();
/// Sphere with a sin^4 bump term in the second coordinate.
TestSurface surface_f2();
TestSurface surface_by_name(const std::string& name);

/// n seeded random points projected onto the zero set by damped Newton
/// steps along the gradient; |F| <= 1e-10 at every sample.
PointSet sample_surface(const TestSurface& surface, Eigen::Index n,
                        unsigned seed);

/// sqrt(mean F(v)^2) over mesh vertices: the implicit residual of the
/// reconstruction against the true zero set.
double rmse_surface(const IsoMesh& mesh, const TestSurface& surface);

struct SweepRow {
  double epsilon;
  Method method;
  std::optional<double> rmse;  // empty on conditioning failure
  double seconds;
};

struct SweepResult {
  std::string surface;
  Eigen::Index n{0};
  unsigned seed{0};
  KernelFamily kernel{KernelFamily::GaussianCInf};
  std::vector<SweepRow> rows;

  std::optional<double> best_rmse(Method method) const;
};

struct SweepOptions {
  std::vector<double> epsilons;  // empty -> 20 log-spaced in [1e-3, 1e2]
  std::vector<Method> methods{Method::RBF, Method::RRBF};
  PipelineConfig base;  // kernel family and epsilon overridden per row
};

std::vector<double> default_epsilon_grid();

SweepResult epsilon_sweep(const TestSurface& surface, Eigen::Index n,
                          KernelFamily kernel, unsigned seed,
                          const SweepOptions& opts = {});

void write_sweep_csv(const SweepResult& result, const std::string& path);

/// Seeded k-fold cross-validation over the surface points: each fold is
/// held out of the fit (off-surface children included) and the error is
/// sqrt(mean (I(x_i) - a)^2) over held-out surface points.
double cross_validation_error(const PointSet& points,
                              const std::optional<Points3>& normals,
                              const PipelineConfig& config, int folds,
                              unsigned seed);

}  // namespace rrbfpu
