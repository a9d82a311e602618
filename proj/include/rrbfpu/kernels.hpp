#pragma once

#include <cmath>

#include "rrbfpu/types.hpp"

namespace rrbfpu {

enum class KernelFamily { GaussianCInf, WendlandC2 };

/// Radial kernel phi_eps(r); both families have phi(0) = 1.
struct KernelSpec {
  KernelFamily family{KernelFamily::WendlandC2};
  double epsilon{1.0};
};

inline double eval_kernel(const KernelSpec& spec, double r) {
  const double er = spec.epsilon * r;
  switch (spec.family) {
    case KernelFamily::GaussianCInf:
      return std::exp(-er * er);
    case KernelFamily::WendlandC2: {
      if (er >= 1.0) return 0.0;
      const double t = 1.0 - er;
      const double t2 = t * t;
      return t2 * t2 * (4.0 * er + 1.0);
    }
  }
  return 0.0;
}

/// Radius at which the kernel has decayed to `ratio` (phi(0) = 1 for both
/// families): the smallest r with phi(r) <= ratio. Requires 0 < ratio < 1.
inline double kernel_decay_radius(const KernelSpec& spec, double ratio) {
  switch (spec.family) {
    case KernelFamily::GaussianCInf:
      return std::sqrt(-std::log(ratio)) / spec.epsilon;
    case KernelFamily::WendlandC2: {
      double lo = 0.0, hi = 1.0 / spec.epsilon;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eval_kernel(spec, mid) > ratio ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

/// (i,k) entry is phi_eps(||x_i - y_k||); symmetric when X == Y.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points3& x,
                              const Points3& y);

inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points3& x) {
  return kernel_matrix(spec, x, x);
}

}  // namespace rrbfpu
