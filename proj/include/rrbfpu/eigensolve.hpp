#pragma once

#include <Eigen/Cholesky>

#include "rrbfpu/types.hpp"

namespace rrbfpu {

/// SPD pencil (Lambda, Theta) of the rational-interpolant eigenproblem,
///   Lambda = D A^{-1} D / ||f||^2 + A^{-1},   Theta = D^2 / ||f||^2 + I,
/// with D = diag(f). A is applied through its cached Cholesky factor;
/// Theta is diagonal.
class PencilOperators {
 public:
  PencilOperators(const Eigen::MatrixXd& kernel_matrix, const Eigen::VectorXd& f);

  Eigen::Index order() const { return f_.size(); }

  Eigen::VectorXd apply_lambda(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_theta(const Eigen::VectorXd& v) const {
    return theta_diag_.cwiseProduct(v);
  }
  const Eigen::VectorXd& theta_diag() const { return theta_diag_; }

  Eigen::VectorXd solve_kernel(const Eigen::VectorXd& rhs) const {
    return llt_.solve(rhs);
  }
  const Eigen::VectorXd& values() const { return f_; }

  /// Dense formation of Lambda, for oracles and the dense eigensolver.
  Eigen::MatrixXd dense_lambda() const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd f_;
  Eigen::VectorXd theta_diag_;
  double f_norm2_;  // ||f||_2^2
};

struct EigenResult {
  double lambda_min{0.0};
  Eigen::VectorXd q;  // Theta-normalized
  int iterations{0};
  double residual{0.0};  // ||Lambda q - lambda Theta q|| / ||Lambda q||
};

struct DacgOptions {
  double tol{1e-8};
  int max_iter{500};
  Eigen::Index dense_fallback_threshold{2000};
};

/// Smallest eigenpair by direct reduction with the diagonal Theta factor.
EigenResult smallest_eigpair_dense(const PencilOperators& pencil);

/// Rayleigh-quotient minimization by nonlinear CG (Polak-Ribiere) with
/// exact line search on the 2x2 projected pencil. Falls back to the dense
/// solver when the iteration limit is hit on a small problem.
EigenResult smallest_eigpair_dacg(const PencilOperators& pencil,
                                  const DacgOptions& opts = {});

}  // namespace rrbfpu
