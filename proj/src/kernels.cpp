#include "rrbfpu/kernels.hpp"

namespace rrbfpu {

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points3& x,
                              const Points3& y) {
  if (x.cols() == 0 || y.cols() == 0) throw Error("kernel_matrix: empty point set");
  Eigen::MatrixXd a(x.cols(), y.cols());
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      a(i, k) = eval_kernel(spec, (x.col(i) - y.col(k)).norm());
    }
  }
  return a;
}

}  // namespace rrbfpu
