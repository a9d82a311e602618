#include "rrbfpu/interpolants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace rrbfpu {

namespace {

// Gaussian values below exp(-36) ~ 2e-16 are under double rounding noise of
// the row's unit-height entries; skipping the exp there only perturbs sums
// at the last ulp and saves the dominant cost of far-field evaluations.
constexpr double kGaussCut2 = 36.0;

Eigen::VectorXd kernel_row(const KernelSpec& spec, const Points3& nodes,
                           const Vec3& x) {
  Eigen::VectorXd row(nodes.cols());
  if (spec.family == KernelFamily::GaussianCInf) {
    const double e2 = spec.epsilon * spec.epsilon;
    for (Eigen::Index k = 0; k < nodes.cols(); ++k) {
      const double t2 = e2 * (nodes.col(k) - x).squaredNorm();
      row(k) = t2 > kGaussCut2 ? 0.0 : std::exp(-t2);
    }
  } else {
    for (Eigen::Index k = 0; k < nodes.cols(); ++k)
      row(k) = eval_kernel(spec, (nodes.col(k) - x).norm());
  }
  return row;
}

double rational_ratio(const LocalRRBF& fit, const Eigen::VectorXd& row,
                      const Vec3& x) {
  const double denom = fit.beta.dot(row);
  // Guard floor: coefficient scale times the kernel's maximum value. A
  // denominator this small means the expansion has either cancelled or
  // decayed below any meaningful level at x, so the ratio carries no
  // information there.
  const double guard = 1e-12 * fit.beta.norm() * eval_kernel(fit.kernel, 0.0);
  if (std::abs(denom) < guard) {
    std::ostringstream msg;
    msg << "eval_rrbf: denominator near zero at (" << x.x() << ", " << x.y()
        << ", " << x.z() << ")";
    throw DenominatorNearZeroError(msg.str());
  }
  return fit.alpha.dot(row) / denom;
}

}  // namespace

LocalRBF fit_rbf_local(const Points3& nodes, const Eigen::VectorXd& values,
                       const KernelSpec& kernel) {
  if (nodes.cols() < 1) throw Error("fit_rbf_local: empty node set");
  if (nodes.cols() != values.size())
    throw Error("fit_rbf_local: node/value count mismatch");
  const Eigen::MatrixXd a = kernel_matrix(kernel, nodes);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw ConditioningError("fit_rbf_local: kernel matrix Cholesky failed");
  return {nodes, llt.solve(values), kernel};
}

LocalRRBF fit_rrbf_local(const Points3& nodes, const Eigen::VectorXd& values,
                         const KernelSpec& kernel, const DacgOptions& eig_opts) {
  if (nodes.cols() < 1) throw Error("fit_rrbf_local: empty node set");
  if (nodes.cols() != values.size())
    throw Error("fit_rrbf_local: node/value count mismatch");
  if ((values.array() == 0.0).any())
    throw ZeroFunctionValueError("fit_rrbf_local: zero function value");

  const Eigen::MatrixXd a = kernel_matrix(kernel, nodes);
  // One Cholesky of A serves the pencil operators and both linear systems.
  PencilOperators pencil(a, values);
  const EigenResult eig = smallest_eigpair_dacg(pencil, eig_opts);

  const Eigen::VectorXd& q = eig.q;
  const Eigen::VectorXd p = values.cwiseProduct(q);
  LocalRRBF fit;
  fit.nodes = nodes;
  fit.alpha = pencil.solve_kernel(p);
  fit.beta = pencil.solve_kernel(q);
  fit.kernel = kernel;
  fit.lambda_min = eig.lambda_min;
  return fit;
}

double eval_rbf(const LocalRBF& fit, const Vec3& x) {
  return fit.alpha.dot(kernel_row(fit.kernel, fit.nodes, x));
}

double eval_rrbf(const LocalRRBF& fit, const Vec3& x) {
  return rational_ratio(fit, kernel_row(fit.kernel, fit.nodes, x), x);
}

std::optional<double> eval_rrbf_resolved(const LocalRRBF& fit, const Vec3& x,
                                         double trust_radius,
                                         double near_radius) {
  const Eigen::Index n = fit.nodes.cols();
  const Eigen::Index needed = std::min<Eigen::Index>(10, n);
  const double trust_r2 = trust_radius * trust_radius;
  const double near_r2 = near_radius * near_radius;
  // Distance pre-pass: cheaply reject patches that cannot resolve x before
  // spending any kernel evaluations on them.
  Eigen::VectorXd dist2(n);
  Eigen::Index close = 0;
  bool adjacent = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    dist2(k) = (fit.nodes.col(k) - x).squaredNorm();
    if (dist2(k) <= trust_r2) ++close;
    if (dist2(k) <= near_r2) adjacent = true;
  }
  if (close < needed && !adjacent) return std::nullopt;

  Eigen::VectorXd row(n);
  if (fit.kernel.family == KernelFamily::GaussianCInf) {
    const double e2 = fit.kernel.epsilon * fit.kernel.epsilon;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t2 = e2 * dist2(k);
      row(k) = t2 > kGaussCut2 ? 0.0 : std::exp(-t2);
    }
  } else {
    for (Eigen::Index k = 0; k < n; ++k)
      row(k) = eval_kernel(fit.kernel, std::sqrt(dist2(k)));
  }
  return rational_ratio(fit, row, x);
}

}  // namespace rrbfpu
