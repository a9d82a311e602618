#pragma once

#include <optional>

#include "rrbfpu/eigensolve.hpp"
#include "rrbfpu/kernels.hpp"
#include "rrbfpu/types.hpp"

namespace rrbfpu {

/// Standard local RBF expansion R(x) = sum_k alpha_k phi(||x - x_k||).
struct LocalRBF {
  Points3 nodes;
  Eigen::VectorXd alpha;
  KernelSpec kernel;
};

/// Rational local expansion L(x) = R1(x) / R2(x) with shared nodes.
struct LocalRRBF {
  Points3 nodes;
  Eigen::VectorXd alpha;  // numerator coefficients
  Eigen::VectorXd beta;   // denominator coefficients
  KernelSpec kernel;
  double lambda_min{0.0};  // diagnostic from the pencil eigenproblem
};

LocalRBF fit_rbf_local(const Points3& nodes, const Eigen::VectorXd& values,
                       const KernelSpec& kernel);

LocalRRBF fit_rrbf_local(const Points3& nodes, const Eigen::VectorXd& values,
                         const KernelSpec& kernel, const DacgOptions& eig_opts = {});

double eval_rbf(const LocalRBF& fit, const Vec3& x);
double eval_rrbf(const LocalRRBF& fit, const Vec3& x);

/// Rational evaluation gated by a resolution test: returns nullopt when
/// fewer than min(10, n) nodes lie within `trust_radius` of x, unless some
/// node lies within `near_radius` (pass the off-surface companion offset:
/// inside that band the field is directly data-supported however sparse the
/// neighborhood). Outside both, the expansion no longer resolves a fittable
/// neighborhood and the ratio is extrapolation noise.
std::optional<double> eval_rrbf_resolved(const LocalRRBF& fit, const Vec3& x,
                                         double trust_radius,
                                         double near_radius = 0.0);

}  // namespace rrbfpu
