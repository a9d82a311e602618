#include <doctest.h>

#include <Eigen/QR>
#include <random>

#include "rrbfpu/interpolants.hpp"
#include "test_helpers.hpp"

using namespace rrbfpu;
using rrbfpu::testing::random_points;
using rrbfpu::testing::sphere_points;

TEST_CASE("single node RBF fit reproduces its value") {
  const Points3 node = Points3::Constant(3, 1, 0.2);
  Eigen::VectorXd v(1);
  v << 4.5;
  const LocalRBF fit = fit_rbf_local(node, v, {KernelFamily::GaussianCInf, 1.0});
  CHECK(fit.alpha(0) == doctest::Approx(4.5));
  CHECK(eval_rbf(fit, node.col(0)) == doctest::Approx(4.5));
}

TEST_CASE("RBF interpolation conditions hold at the nodes") {
  const PointSet pts = random_points(10, 3);
  const Eigen::VectorXd values = Eigen::VectorXd::Constant(10, 2.5);
  const LocalRBF fit =
      fit_rbf_local(pts.coords, values, {KernelFamily::GaussianCInf, 2.0});
  for (Eigen::Index i = 0; i < 10; ++i)
    CHECK(eval_rbf(fit, pts.point(i)) == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("RBF residual matches an independent dense solve") {
  // 20 nodes embedded along a line.
  Points3 nodes(3, 20);
  for (int i = 0; i < 20; ++i) nodes.col(i) = Vec3(i / 19.0, 0.2, 0.7);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::VectorXd f(20);
  for (int i = 0; i < 20; ++i) f(i) = dist(rng);

  const KernelSpec spec{KernelFamily::WendlandC2, 1.0};
  const LocalRBF fit = fit_rbf_local(nodes, f, spec);

  const Eigen::MatrixXd a = kernel_matrix(spec, nodes);
  const Eigen::VectorXd alpha_oracle =
      a.colPivHouseholderQr().solve(f);  // independent solver
  CHECK((a * fit.alpha - f).norm() ==
        doctest::Approx((a * alpha_oracle - f).norm()).epsilon(1e-6));
  CHECK((fit.alpha - alpha_oracle).norm() <= 1e-6 * alpha_oracle.norm());
}

TEST_CASE("RRBF interpolates two nodes exactly") {
  Points3 nodes(3, 2);
  nodes.col(0) = Vec3(0.2, 0.2, 0.2);
  nodes.col(1) = Vec3(0.8, 0.6, 0.4);
  Eigen::VectorXd f(2);
  f << 2.0, 3.0;
  const LocalRRBF fit =
      fit_rrbf_local(nodes, f, {KernelFamily::GaussianCInf, 1.0});
  CHECK(eval_rrbf(fit, nodes.col(0)) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(eval_rrbf(fit, nodes.col(1)) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.lambda_min > 0.0);
}

TEST_CASE("RRBF constant data reproduces the constant everywhere") {
  const PointSet pts = random_points(30, 8, 0.3, 0.7);
  const double c = 2.0;
  const Eigen::VectorXd values = Eigen::VectorXd::Constant(30, c);
  const LocalRRBF fit =
      fit_rrbf_local(pts.coords, values, {KernelFamily::WendlandC2, 1.0});

  // p = c q forces alpha = c beta exactly, hence L == c wherever R2 != 0.
  CHECK((fit.alpha - c * fit.beta).norm() <= 1e-10 * fit.beta.norm());

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coord(0.3, 0.7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    CHECK(eval_rrbf(fit, x) == doctest::Approx(c).epsilon(1e-8));
  }
}

TEST_CASE("RRBF node residuals on a sphere-patch level dataset") {
  // Patch-style data: levels 2/3/1 over sphere samples.
  const PointSet base = sphere_points(40, 23);
  const Points3& nodes = base.coords;
  Eigen::VectorXd f(40);
  for (int i = 0; i < 40; ++i)
    f(i) = (i % 3 == 0) ? 2.0 : (i % 3 == 1 ? 3.0 : 1.0);
  const LocalRRBF fit = fit_rrbf_local(nodes, f, {KernelFamily::WendlandC2, 1.0});
  double max_resid = 0.0;
  for (int i = 0; i < 40; ++i)
    max_resid = std::max(max_resid, std::abs(eval_rrbf(fit, nodes.col(i)) - f(i)));
  CHECK(max_resid <= 1e-8 * f.cwiseAbs().maxCoeff());
}

TEST_CASE("eval_rrbf with beta = alpha is identically one") {
  const PointSet pts = random_points(8, 4);
  const Eigen::VectorXd values = Eigen::VectorXd::Constant(8, 1.0);
  LocalRRBF fit = fit_rrbf_local(pts.coords, values,
                                 {KernelFamily::GaussianCInf, 1.0});
  fit.beta = fit.alpha;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    CHECK(eval_rrbf(fit, x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("joint scaling of numerator and denominator leaves eval unchanged") {
  const PointSet pts = random_points(12, 9, 0.2, 0.8);
  Eigen::VectorXd f(12);
  for (int i = 0; i < 12; ++i) f(i) = (i % 2 == 0) ? 2.0 : 3.0;
  LocalRRBF fit = fit_rrbf_local(pts.coords, f, {KernelFamily::WendlandC2, 1.5});
  LocalRRBF scaled = fit;
  scaled.alpha *= -7.5;
  scaled.beta *= -7.5;
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> coord(0.2, 0.8);
  for (int i = 0; i < 50; ++i) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    const double a = eval_rrbf(fit, x);
    CHECK(eval_rrbf(scaled, x) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("off-node evaluation matches a scalar summation oracle") {
  const PointSet pts = random_points(5, 14);
  Eigen::VectorXd f(5);
  f << 1.0, 2.0, 3.0, 2.0, 1.5;
  const KernelSpec spec{KernelFamily::GaussianCInf, 1.3};
  const LocalRBF rbf = fit_rbf_local(pts.coords, f, spec);
  const LocalRRBF rrbf = fit_rrbf_local(pts.coords, f, spec);

  const Vec3 x(0.31, 0.77, 0.12);
  double num = 0.0, den = 0.0, plain = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double phi = eval_kernel(spec, (pts.point(k) - x).norm());
    plain += rbf.alpha(k) * phi;
    num += rrbf.alpha(k) * phi;
    den += rrbf.beta(k) * phi;
  }
  CHECK(eval_rbf(rbf, x) == doctest::Approx(plain).epsilon(1e-14));
  CHECK(eval_rrbf(rrbf, x) == doctest::Approx(num / den).epsilon(1e-14));
}

TEST_CASE("zero values are rejected for RRBF") {
  const PointSet pts = random_points(4, 1);
  Eigen::VectorXd f(4);
  f << 1.0, 0.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit_rrbf_local(pts.coords, f, {KernelFamily::WendlandC2, 1.0}),
                  const ZeroFunctionValueError&);
}

TEST_CASE("denominator guard reports near-zero evaluation") {
  Points3 nodes = Points3::Constant(3, 1, 0.5);
  LocalRRBF fit;
  fit.nodes = nodes;
  fit.alpha = Eigen::VectorXd::Ones(1);
  fit.beta = Eigen::VectorXd::Ones(1);
  fit.kernel = {KernelFamily::WendlandC2, 10.0};  // support radius 0.1
  CHECK_THROWS_AS(eval_rrbf(fit, Vec3(0.9, 0.9, 0.9)),
                  const DenominatorNearZeroError&);
}

TEST_CASE("single-patch error shrinks as the node count grows") {
  // Smooth test function sampled in one patch; max probe error should not
  // grow as nodes are added.
  auto fn = [](const Vec3& x) {
    return std::sin(3.0 * x.x()) + x.y() * x.y() + 0.5 * x.z();
  };
  const KernelSpec spec{KernelFamily::WendlandC2, 1.0};
  std::vector<double> errors;
  for (const int n : {50, 100, 200}) {
    const PointSet pts = random_points(n, 40, 0.3, 0.7);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = fn(pts.point(i)) + 10.0;  // keep nonzero
    const LocalRRBF fit = fit_rrbf_local(pts.coords, f, spec);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> coord(0.32, 0.68);
    double max_err = 0.0;
    for (int p = 0; p < 100; ++p) {
      const Vec3 x(coord(rng), coord(rng), coord(rng));
      max_err = std::max(max_err, std::abs(eval_rrbf(fit, x) - (fn(x) + 10.0)));
    }
    errors.push_back(max_err);
  }
  CHECK(errors.back() <= errors.front() * 1.5);  // monotone trend within noise
}
