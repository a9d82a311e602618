#include "rrbfpu/eigensolve.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rrbfpu {

PencilOperators::PencilOperators(const Eigen::MatrixXd& kernel_matrix,
                                 const Eigen::VectorXd& f)
    : f_(f) {
  if (kernel_matrix.rows() != kernel_matrix.cols() ||
      kernel_matrix.rows() != f.size())
    throw Error("PencilOperators: dimension mismatch");
  if ((f.array() == 0.0).any())
    throw ZeroFunctionValueError(
        "PencilOperators: zero function value at a data site");
  llt_.compute(kernel_matrix);
  if (llt_.info() != Eigen::Success)
    throw ConditioningError("PencilOperators: Cholesky of kernel matrix failed");
  f_norm2_ = f.squaredNorm();
  theta_diag_ = f.array().square() / f_norm2_ + 1.0;
}

Eigen::VectorXd PencilOperators::apply_lambda(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd dv = f_.cwiseProduct(v);
  return f_.cwiseProduct(llt_.solve(dv)) / f_norm2_ + llt_.solve(v);
}

Eigen::MatrixXd PencilOperators::dense_lambda() const {
  const Eigen::Index n = order();
  const Eigen::MatrixXd a_inv =
      llt_.solve(Eigen::MatrixXd::Identity(n, n));
  return f_.asDiagonal() * a_inv * f_.asDiagonal() / f_norm2_ + a_inv;
}

namespace {

double relative_residual(const PencilOperators& pencil, double lambda,
                         const Eigen::VectorXd& q) {
  const Eigen::VectorXd lq = pencil.apply_lambda(q);
  return (lq - lambda * pencil.apply_theta(q)).norm() / lq.norm();
}

void theta_normalize(const PencilOperators& pencil, Eigen::VectorXd& q) {
  q /= std::sqrt(q.dot(pencil.apply_theta(q)));
}

}  // namespace

EigenResult smallest_eigpair_dense(const PencilOperators& pencil) {
  // Theta is diagonal, so the reduction factor is elementwise.
  const Eigen::VectorXd s = pencil.theta_diag().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd reduced =
      s.asDiagonal() * pencil.dense_lambda() * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  if (eig.info() != Eigen::Success)
    throw Error("smallest_eigpair_dense: eigensolver failed");

  EigenResult res;
  res.lambda_min = eig.eigenvalues()(0);
  res.q = s.cwiseProduct(eig.eigenvectors().col(0));
  theta_normalize(pencil, res.q);
  res.residual = relative_residual(pencil, res.lambda_min, res.q);
  return res;
}

EigenResult smallest_eigpair_dacg(const PencilOperators& pencil,
                                  const DacgOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error("smallest_eigpair_dacg: tol must be positive");
  const Eigen::Index n = pencil.order();

  Eigen::VectorXd q = Eigen::VectorXd::Ones(n);
  theta_normalize(pencil, q);

  Eigen::VectorXd lq = pencil.apply_lambda(q);
  Eigen::VectorXd tq = pencil.apply_theta(q);
  double rho = q.dot(lq);  // Rayleigh quotient; q is Theta-normalized

  Eigen::VectorXd g_prev, p;
  EigenResult res;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd g = 2.0 * (lq - rho * tq);
    const double res_rel = relative_residual(pencil, rho, q);
    if (res_rel <= opts.tol) {
      res.lambda_min = rho;
      res.q = q;
      res.iterations = iter - 1;
      res.residual = res_rel;
      return res;
    }

    if (iter == 1) {
      p = -g;
    } else {
      const double beta =
          std::max(0.0, g.dot(g - g_prev) / g_prev.squaredNorm());
      p = -g + beta * p;
    }
    g_prev = g;

    // Theta-orthogonalize the direction against q; a parallel direction
    // leaves the quotient stationary.
    p -= q.dot(pencil.apply_theta(p)) * q;
    const double p_theta_norm = std::sqrt(p.dot(pencil.apply_theta(p)));
    if (!(p_theta_norm > 1e-300)) break;
    p /= p_theta_norm;

    // Exact line search: smallest eigenpair of the pencil projected on
    // span{q, p}.
    const Eigen::VectorXd lp = pencil.apply_lambda(p);
    const Eigen::VectorXd tp = pencil.apply_theta(p);
    Eigen::Matrix2d lam2, th2;
    lam2 << q.dot(lq), q.dot(lp), p.dot(lq), p.dot(lp);
    th2 << q.dot(tq), q.dot(tp), p.dot(tq), p.dot(tp);
    lam2 = 0.5 * (lam2 + lam2.transpose().eval());
    th2 = 0.5 * (th2 + th2.transpose().eval());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> small(lam2, th2);
    const Eigen::Vector2d c = small.eigenvectors().col(0);

    Eigen::VectorXd q_next = c(0) * q + c(1) * p;
    theta_normalize(pencil, q_next);
    q = q_next;
    lq = pencil.apply_lambda(q);
    tq = pencil.apply_theta(q);
    const double rho_next = q.dot(lq);
    // The exact line search cannot increase the quotient.
    if (rho_next > rho * (1.0 + 1e-12) + 1e-300)
      throw Error("smallest_eigpair_dacg: Rayleigh quotient increased");
    rho = rho_next;
  }

  if (n <= opts.dense_fallback_threshold) return smallest_eigpair_dense(pencil);
  throw Error("smallest_eigpair_dacg: max_iter exceeded");
}

}  // namespace rrbfpu
