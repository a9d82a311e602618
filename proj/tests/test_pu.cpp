#include <doctest.h>

#include <random>

#include "rrbfpu/pu.hpp"
#include "test_helpers.hpp"

using namespace rrbfpu;
using rrbfpu::testing::random_points;
using rrbfpu::testing::sphere_points;

namespace {

AugmentedDataset uniform_dataset(Eigen::Index n, unsigned seed,
                                 double value = 2.0) {
  AugmentedDataset data;
  data.nodes = random_points(n, seed, 0.02, 0.98);
  data.values = Eigen::VectorXd::Constant(n, value);
  data.origin.assign(n, NodeOrigin::Surface);
  data.levels = LevelValues::rational_defaults();
  data.surface_count = n;
  return data;
}

}  // namespace

TEST_CASE("covering formulas") {
  SUBCASE("N = 3267 gives d = 512 and delta = gamma/8") {
    const Covering cov = build_covering(1.0, 3267);
    CHECK(cov.per_side == 8);
    CHECK(cov.patch_count() == 512);
    CHECK(cov.delta == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  }
  SUBCASE("N = 8 gives a single patch of radius gamma") {
    const Covering cov = build_covering(2.0, 8);
    CHECK(cov.patch_count() == 1);
    CHECK(cov.delta == doctest::Approx(2.0));
    CHECK((cov.centers.col(0) - Vec3::Constant(1.0)).norm() <= 1e-15);
  }
  SUBCASE("Monte-Carlo covering check") {
    const Covering cov = build_covering(1.0, 5000);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
      const Vec3 x(coord(rng), coord(rng), coord(rng));
      double nearest = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < cov.patch_count(); ++j)
        nearest = std::min(nearest, (x - cov.centers.col(j)).norm());
      CHECK(nearest <= cov.delta);
    }
  }
}

TEST_CASE("shepard weights") {
  Covering cov = build_covering(1.0, 3000);  // 8 per side? N^(1/3)/2 ~ 7.2 -> 8
  // Give every patch a dummy fitted status.
  std::vector<bool> has_fit(cov.patch_count(), true);

  SUBCASE("patch center dominated by its own patch") {
    // Centers of neighboring patches are delta away, where the bump is 0.
    const Vec3 x = cov.centers.col(0);
    const auto w = shepard_weights(cov, has_fit, x);
    REQUIRE(w.size() == 1);
    CHECK(w[0].weight == doctest::Approx(1.0));
  }

  SUBCASE("midpoint of two patch centers splits evenly") {
    // Pick two adjacent patch centers along z (indices differ by 1).
    const Vec3 x = 0.5 * (cov.centers.col(0) + cov.centers.col(1));
    const auto w = shepard_weights(cov, has_fit, x);
    double w0 = 0.0, w1 = 0.0;
    for (const auto& pw : w) {
      if (pw.patch == 0) w0 = pw.weight;
      if (pw.patch == 1) w1 = pw.weight;
    }
    CHECK(w0 == doctest::Approx(w1).epsilon(1e-12));
  }

  SUBCASE("weights sum to one and match a direct normalization oracle") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> coord(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
      const Vec3 x(coord(rng), coord(rng), coord(rng));
      const auto w = shepard_weights(cov, has_fit, x);
      double sum = 0.0;
      for (const auto& pw : w) sum += pw.weight;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

      // Oracle: recompute the bump over all patches.
      double total = 0.0;
      for (Eigen::Index j = 0; j < cov.patch_count(); ++j) {
        const double r = (x - cov.centers.col(j)).norm();
        total += eval_kernel({KernelFamily::WendlandC2, 1.0 / cov.radius[j]}, r);
      }
      for (const auto& pw : w) {
        const double r = (x - cov.centers.col(pw.patch)).norm();
        const double bump =
            eval_kernel({KernelFamily::WendlandC2, 1.0 / cov.radius[pw.patch]}, r);
        CHECK(pw.weight == doctest::Approx(bump / total).epsilon(1e-12));
      }
    }
  }

  SUBCASE("compact support is exact at the patch boundary") {
    const Eigen::Index j = 0;
    const Vec3 dir(1, 0, 0);
    const Vec3 on_boundary = cov.centers.col(j) + cov.radius[j] * dir;
    for (const auto& pw : shepard_weights(cov, has_fit, on_boundary))
      CHECK(pw.patch != j);
  }

  SUBCASE("uncovered point signals an error") {
    std::vector<bool> none(cov.patch_count(), false);
    CHECK_THROWS_AS(shepard_weights(cov, none, Vec3(0.5, 0.5, 0.5)),
                    const UncoveredPointError&);
  }
}

TEST_CASE("patch growth policy") {
  // Nodes clustered in one corner: patches near them fill up, far patches
  // grow all the way and may still end up empty.
  AugmentedDataset data = uniform_dataset(3000, 3);
  data.nodes.coords = 0.1 * data.nodes.coords;
  Covering cov = build_covering(1.0, data.nodes.count());
  SpatialIndex index(data.nodes, cov.delta);
  PUOptions opts;
  opts.min_points = 10;
  assign_patch_nodes(cov, index, opts);
  const double max_r =
      cov.delta * std::pow(opts.growth_factor, opts.max_growth_steps);
  bool saw_grown_empty = false;
  for (Eigen::Index j = 0; j < cov.patch_count(); ++j) {
    CHECK(cov.radius[j] >= cov.delta);
    CHECK(cov.radius[j] <= max_r + 1e-15);
    if (static_cast<int>(cov.patch_nodes[j].size()) >= opts.min_points)
      // enough nodes: growth stops, so the radius never hits the cap
      // unless the last step was what got it there
      CHECK(cov.radius[j] <= max_r + 1e-15);
    if (cov.patch_nodes[j].empty()) {
      CHECK(cov.radius[j] == doctest::Approx(max_r));
      saw_grown_empty = true;
    }
  }
  CHECK(saw_grown_empty);
}

TEST_CASE("single patch equals its local fit everywhere covered") {
  AugmentedDataset data = uniform_dataset(8, 5);
  for (Eigen::Index i = 0; i < 8; ++i) data.values(i) = 1.0 + 0.1 * i;
  Covering cov = build_covering(1.0, 8);  // one patch
  const PUInterpolant interp =
      fit_pu(data, cov, {KernelFamily::GaussianCInf, 2.0}, Method::RBF);
  REQUIRE(interp.covering.patch_count() == 1);
  const LocalRBF& local = std::get<LocalRBF>(*interp.fits[0]);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> coord(0.3, 0.7);
  for (int t = 0; t < 50; ++t) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    CHECK(interp.eval(x) == doctest::Approx(eval_rbf(local, x)).epsilon(1e-12));
  }
}

TEST_CASE("partition of unity and interpolation inheritance") {
  AugmentedDataset data = uniform_dataset(1500, 6);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> vals(1.0, 4.0);
  for (Eigen::Index i = 0; i < data.nodes.count(); ++i) data.values(i) = vals(rng);

  Covering cov = build_covering(1.0, data.nodes.count());
  const KernelSpec kernel{KernelFamily::WendlandC2, 1.0};
  const PUInterpolant interp = fit_pu(data, cov, kernel, Method::RBF);

  SUBCASE("weights sum to one at random covered points") {
    std::uniform_real_distribution<double> coord(0.1, 0.9);
    for (int t = 0; t < 10000; ++t) {
      const Vec3 x(coord(rng), coord(rng), coord(rng));
      double sum = 0.0;
      for (const auto& pw : interp.weights_at(x)) sum += pw.weight;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("global interpolant inherits the node values") {
    double max_err = 0.0;
    for (Eigen::Index i = 0; i < data.nodes.count(); ++i)
      max_err = std::max(max_err,
                         std::abs(interp.eval(data.nodes.point(i)) - data.values(i)));
    CHECK(max_err <= 1e-6 * data.values.cwiseAbs().maxCoeff());
  }

  SUBCASE("evaluation matches a brute-force blend over all patches") {
    std::uniform_real_distribution<double> coord(0.1, 0.9);
    for (int t = 0; t < 20; ++t) {
      const Vec3 x(coord(rng), coord(rng), coord(rng));
      double num = 0.0, den = 0.0;
      for (Eigen::Index j = 0; j < interp.covering.patch_count(); ++j) {
        if (!interp.fits[j]) continue;
        const double r = (x - interp.covering.centers.col(j)).norm();
        if (r >= interp.covering.radius[j]) continue;
        const double w = eval_kernel(
            {KernelFamily::WendlandC2, 1.0 / interp.covering.radius[j]}, r);
        num += w * eval_rbf(std::get<LocalRBF>(*interp.fits[j]), x);
        den += w;
      }
      CHECK(interp.eval(x) == doctest::Approx(num / den).epsilon(1e-10));
    }
  }
}

TEST_CASE("bounded overlap for the ungrown default covering") {
  AugmentedDataset data = uniform_dataset(4000, 31);
  Covering cov = build_covering(1.0, data.nodes.count());
  SpatialIndex index(data.nodes, cov.delta);
  PUOptions opts;
  opts.min_points = 1;  // no growth
  assign_patch_nodes(cov, index, opts);
  std::vector<bool> has_fit(cov.patch_count());
  for (Eigen::Index j = 0; j < cov.patch_count(); ++j)
    has_fit[j] = !cov.patch_nodes[j].empty();

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    int overlap = 0;
    for (Eigen::Index j = 0; j < cov.patch_count(); ++j)
      if ((x - cov.centers.col(j)).norm() < cov.radius[j]) ++overlap;
    CHECK(overlap <= 27);
  }
}

TEST_CASE("constant local fits blend to the constant") {
  AugmentedDataset data = uniform_dataset(800, 21, 2.0);
  Covering cov = build_covering(1.0, data.nodes.count());
  const PUInterpolant interp =
      fit_pu(data, cov, {KernelFamily::WendlandC2, 1.0}, Method::RRBF);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(0.1, 0.9);
  for (int t = 0; t < 1000; ++t) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    CHECK(interp.eval(x) == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("sphere dataset: every surface node lies in a fitted patch") {
  AugmentedDataset data;
  data.nodes = sphere_points(1089, 13);
  data.values = Eigen::VectorXd::Constant(1089, 2.0);
  data.origin.assign(1089, NodeOrigin::Surface);
  data.levels = LevelValues::rational_defaults();
  data.surface_count = 1089;

  Covering cov = build_covering(1.0, data.nodes.count());
  const PUInterpolant interp =
      fit_pu(data, cov, {KernelFamily::WendlandC2, 1.0}, Method::RBF);
  for (Eigen::Index i = 0; i < data.nodes.count(); ++i) {
    const auto w = interp.weights_at(data.nodes.point(i));
    CHECK(!w.empty());
  }
}

TEST_CASE("RRBF method rejects zero values") {
  AugmentedDataset data = uniform_dataset(20, 2);
  data.values(5) = 0.0;
  Covering cov = build_covering(1.0, 20);
  CHECK_THROWS_AS(
      fit_pu(data, cov, {KernelFamily::WendlandC2, 1.0}, Method::RRBF),
      const ZeroFunctionValueError&);
}

TEST_CASE("uncovered evaluation: sentinel by default, error when disabled") {
  AugmentedDataset data;
  data.nodes.coords = Points3::Constant(3, 8, 0.5);
  for (Eigen::Index i = 0; i < 8; ++i)
    data.nodes.coords.col(i) += 0.01 * Vec3(i % 2, (i / 2) % 2, i / 4);
  data.values = Eigen::VectorXd::Constant(8, 2.0);
  data.origin.assign(8, NodeOrigin::Surface);
  data.levels = LevelValues::rational_defaults();
  data.surface_count = 8;

  // Many patches, data clustered near the center: corners are uncovered.
  Covering cov = build_covering(1.0, 3267);
  PUOptions opts;
  opts.max_growth_steps = 0;
  const PUInterpolant interp =
      fit_pu(data, cov, {KernelFamily::WendlandC2, 1.0}, Method::RBF, opts);
  CHECK(interp.eval(Vec3(0.01, 0.01, 0.01)) == data.levels.b);

  PUInterpolant strict = interp;
  strict.sentinel_for_uncovered = false;
  CHECK_THROWS_AS(strict.eval(Vec3(0.01, 0.01, 0.01)),
                  const UncoveredPointError&);
}
