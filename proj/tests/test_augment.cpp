#include <doctest.h>

#include "rrbfpu/augment.hpp"
#include "rrbfpu/spatial.hpp"
#include "test_helpers.hpp"

using namespace rrbfpu;
using rrbfpu::testing::sphere_points;

namespace {

// Sphere samples pulled toward the center so that +-delta companions stay
// inside the unit cube (the full radius-0.5 sphere touches the faces).
PointSet shrunk_sphere(Eigen::Index n, unsigned seed) {
  PointSet pts = rrbfpu::testing::sphere_points(n, seed);
  pts.coords = (0.8 * (pts.coords.colwise() - Vec3::Constant(0.5))).colwise() +
               Vec3::Constant(0.5);
  return pts;
}

OrientedNormals radial_normals(const PointSet& pts) {
  OrientedNormals n;
  n.normals.resize(3, pts.count());
  n.degenerate_mask.assign(pts.count(), false);
  for (Eigen::Index i = 0; i < pts.count(); ++i)
    n.normals.col(i) = (pts.point(i) - Vec3::Constant(0.5)).normalized();
  return n;
}

}  // namespace

TEST_CASE("single point produces the textbook triple") {
  PointSet pts(Points3::Constant(3, 1, 0.5));
  OrientedNormals normals;
  normals.normals.resize(3, 1);
  normals.normals.col(0) = Vec3(0, 0, 1);
  normals.degenerate_mask = {false};

  AugmentOptions opts;
  opts.forced_delta = 0.1;
  const auto data = make_offsurface(pts, normals, {2, 3, 1}, opts);

  REQUIRE(data.nodes.count() == 3);
  CHECK(data.nodes.point(0) == Vec3(0.5, 0.5, 0.5));
  CHECK(data.values(0) == 2.0);
  CHECK((data.nodes.point(1) - Vec3(0.5, 0.5, 0.6)).norm() ==
        doctest::Approx(0.0));
  CHECK(data.values(1) == 3.0);
  CHECK((data.nodes.point(2) - Vec3(0.5, 0.5, 0.4)).norm() ==
        doctest::Approx(0.0));
  CHECK(data.values(2) == 1.0);
}

TEST_CASE("no degenerates and no drops gives N = 3n") {
  const PointSet pts = shrunk_sphere(100, 3);
  const auto data = make_offsurface(pts, radial_normals(pts),
                                    LevelValues::rational_defaults(), {});
  CHECK(data.nodes.count() == 300);
  CHECK(data.surface_count == 100);
}

TEST_CASE("degenerate points contribute only their surface node") {
  const PointSet pts = shrunk_sphere(50, 9);
  OrientedNormals normals = radial_normals(pts);
  normals.degenerate_mask[7] = true;
  normals.normals.col(7).setZero();
  const auto data = make_offsurface(pts, normals,
                                    LevelValues::rational_defaults(), {});
  CHECK(data.nodes.count() == 50 + 2 * 49);
}

TEST_CASE("plus/minus midpoints land on the parent node") {
  const PointSet pts = shrunk_sphere(80, 4);
  const auto data = make_offsurface(pts, radial_normals(pts),
                                    LevelValues::rational_defaults(), {});
  const Eigen::Index n = data.surface_count;
  const Eigen::Index pairs = (data.nodes.count() - n) / 2;
  for (Eigen::Index p = 0; p < pairs; ++p) {
    const Vec3 mid =
        0.5 * (data.nodes.point(n + p) + data.nodes.point(n + pairs + p));
    CHECK((mid - data.nodes.point(p)).norm() <= 1e-12);
  }
}

TEST_CASE("delta follows xi times the separation distance") {
  const PointSet pts = sphere_points(64, 12);
  const double q = separation_distance(pts);
  AugmentOptions opts;
  opts.xi = 0.25;
  const auto data = make_offsurface(pts, radial_normals(pts),
                                    LevelValues::rational_defaults(), opts);
  CHECK(data.delta == doctest::Approx(0.25 * q).epsilon(1e-15));
}

TEST_CASE("augmented separation distance does not exceed the original") {
  const PointSet pts = sphere_points(1089, 77);
  const auto data = make_offsurface(pts, radial_normals(pts),
                                    LevelValues::rational_defaults(), {});
  CHECK(separation_distance(data.nodes) <= separation_distance(pts) + 1e-15);
}

TEST_CASE("values match origin tags") {
  const PointSet pts = sphere_points(30, 8);
  const LevelValues levels{2, 3, 1};
  const auto data = make_offsurface(pts, radial_normals(pts), levels, {});
  for (Eigen::Index i = 0; i < data.nodes.count(); ++i) {
    switch (data.origin[i]) {
      case NodeOrigin::Surface: CHECK(data.values(i) == levels.a); break;
      case NodeOrigin::Plus: CHECK(data.values(i) == levels.b); break;
      case NodeOrigin::Minus: CHECK(data.values(i) == levels.c); break;
    }
  }
}

TEST_CASE("error paths") {
  const PointSet pts = sphere_points(10, 2);

  SUBCASE("all normals degenerate") {
    OrientedNormals normals;
    normals.normals = Points3::Zero(3, 10);
    normals.degenerate_mask.assign(10, true);
    CHECK_THROWS_AS(make_offsurface(pts, normals, {2, 3, 1}, {}), const Error&);
  }

  SUBCASE("duplicate points") {
    PointSet dup = pts;
    dup.coords.col(1) = dup.coords.col(0);
    CHECK_THROWS_AS(make_offsurface(dup, radial_normals(dup), {2, 3, 1}, {}),
                    const Error&);
  }

  SUBCASE("levels must be pairwise distinct") {
    CHECK_THROWS_AS(make_offsurface(pts, radial_normals(pts), {2, 2, 1}, {}),
                    const Error&);
  }
}

TEST_CASE("off-surface nodes outside the domain are dropped") {
  // Point near the boundary with a normal pointing out of the cube.
  Points3 p(3, 2);
  p.col(0) = Vec3(0.5, 0.5, 0.999);
  p.col(1) = Vec3(0.5, 0.5, 0.4);
  OrientedNormals normals;
  normals.normals.resize(3, 2);
  normals.normals.col(0) = Vec3(0, 0, 1);
  normals.normals.col(1) = Vec3(0, 0, 1);
  normals.degenerate_mask.assign(2, false);

  AugmentOptions opts;
  opts.forced_delta = 0.01;
  const auto data = make_offsurface(PointSet(p), normals, {2, 3, 1}, opts);
  // First point's companions stay inside? +delta lands at 1.009 -> dropped.
  CHECK(data.nodes.count() == 2 + 2);  // only the second point is augmented
}
