#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "support/brute_force.hpp"
#include "voxproj/errors.hpp"
#include "voxproj/geometry.hpp"
#include "voxproj/volume.hpp"

using namespace voxproj;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const Mat4& a, const Mat4& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

CameraIntrinsics identity_k() {
  CameraIntrinsics k = build_intrinsics(1.0, 1, 1);
  k.cx = 0.0;
  k.cy = 0.0;
  return k;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("build_intrinsics centers the principal point") {
  const CameraIntrinsics a = build_intrinsics(1.0, 3, 3);
  CHECK(a.cx == 1.0);
  CHECK(a.cy == 1.0);
  const CameraIntrinsics b = build_intrinsics(2.5, 32, 32);
  CHECK(b.cx == 15.5);
  CHECK(b.cy == 15.5);
  CHECK_THROWS_AS(build_intrinsics(0.0, 32, 32), InvalidArgument);
  CHECK_THROWS_AS(build_intrinsics(1.0, 0, 32), InvalidArgument);
  const Mat3 k = b.matrix();
  CHECK(k(0, 0) == 2.5);
  CHECK(k(1, 1) == 2.5);
  CHECK(k(0, 2) == 15.5);
  CHECK(k(2, 2) == 1.0);
}

TEST_CASE("viewpoint validation and normalization") {
  const Viewpoint v = make_viewpoint(-kPi / 2, 0.1, 2.0);
  CHECK(v.azimuth == doctest::Approx(1.5 * kPi));
  CHECK(make_viewpoint(2 * kPi, 0.0, 1.0).azimuth == 0.0);
  CHECK_THROWS_AS(make_viewpoint(0.0, kPi / 2, 2.0), InvalidArgument);
  CHECK_THROWS_AS(make_viewpoint(0.0, 0.0, 0.0), InvalidArgument);
  CHECK(azimuth_degrees(viewpoint_from_degrees(375.0, 30.0, 2.0)) == doctest::Approx(15.0));
}

TEST_CASE("extrinsics: camera on +x looks down -x") {
  const Extrinsics e = extrinsics_from_viewpoint(make_viewpoint(0.0, 0.0, 3.0));
  CHECK((e.center - Vec3(3, 0, 0)).norm() < 1e-12);
  const Vec3 forward = e.rotation.row(2).transpose();
  CHECK((forward - Vec3(-1, 0, 0)).norm() < 1e-12);
  CHECK((e.translation + e.rotation * e.center).norm() < 1e-12);
}

TEST_CASE("extrinsics: straight-down view is degenerate") {
  const Viewpoint v{0.0, kPi / 2, 2.0};
  CHECK_THROWS_AS(extrinsics_from_viewpoint(v), DegeneratePose);
}

TEST_CASE("extrinsics: azimuth 90, elevation 30, distance 2") {
  const Extrinsics e = extrinsics_from_viewpoint(make_viewpoint(kPi / 2, kPi / 6, 2.0));
  CHECK((e.center - Vec3(0, std::sqrt(3.0), 1)).norm() < 1e-12);
  // Target in camera coordinates lies on the optical axis in front of the camera.
  const Vec3 cam = e.rotation * (Vec3::Zero() - e.center);
  CHECK(std::abs(cam.x()) < 1e-12);
  CHECK(std::abs(cam.y()) < 1e-12);
  CHECK(cam.z() == doctest::Approx(2.0).epsilon(1e-12));
  // Hand-computed look-at: forward = -C/2, right = forward x z, up = right x forward.
  const Vec3 fwd(0, -std::sqrt(3.0) / 2, -0.5);
  const Vec3 right(-1, 0, 0);
  const Vec3 up = right.cross(fwd);
  Mat3 expected;
  expected.row(0) = right.transpose();
  expected.row(1) = -up.transpose();
  expected.row(2) = fwd.transpose();
  CHECK((e.rotation - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("extrinsics: rotation is orthonormal with det +1") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Viewpoint v = make_viewpoint(test::uniform(rng, -10, 10),
                                       test::uniform(rng, -1.5, 1.5),
                                       test::uniform(rng, 0.5, 5));
    const Vec3 target(test::uniform(rng, -1, 1), test::uniform(rng, -1, 1),
                      test::uniform(rng, -1, 1));
    const Mat3 r = extrinsics_from_viewpoint(v, target).rotation;
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
  }
}

TEST_CASE("compose_transform") {
  SUBCASE("identity") {
    const auto t = compose_transform(identity_k(), Mat3::Identity(), Vec3::Zero());
    CHECK(max_abs_diff(t.theta(), Mat4::Identity()) == 0.0);
  }
  SUBCASE("pure translation") {
    const auto t = compose_transform(identity_k(), Mat3::Identity(), Vec3(1, 2, 3));
    CHECK(t.theta()(0, 3) == 1.0);
    CHECK(t.theta()(1, 3) == 2.0);
    CHECK(t.theta()(2, 3) == 3.0);
    CHECK(t.theta()(3, 3) == 1.0);
  }
  SUBCASE("scaled rotation matches a hand-multiplied product") {
    CameraIntrinsics k = identity_k();
    k.focal = 2.0;
    const auto t = compose_transform(k, rot_z(kPi / 2), Vec3::Zero());
    // diag(2,2,1,1) * rot_z(pi/2) embedded, multiplied out by hand.
    Mat4 expected = Mat4::Zero();
    expected(0, 0) = 2 * std::cos(kPi / 2);
    expected(0, 1) = -2 * std::sin(kPi / 2);
    expected(1, 0) = 2 * std::sin(kPi / 2);
    expected(1, 1) = 2 * std::cos(kPi / 2);
    expected(2, 2) = 1;
    expected(3, 3) = 1;
    CHECK(max_abs_diff(t.theta(), expected) < 1e-15);
  }
  SUBCASE("singular") {
    Mat4 m = Mat4::Identity();
    m(2, 2) = 0.0;
    CHECK_THROWS_AS(PerspectiveTransform::from_matrix(m), SingularMatrix);
  }
}

TEST_CASE("camera_to_world with the identity transform") {
  const auto t = PerspectiveTransform::from_matrix(Mat4::Identity());
  CHECK((camera_to_world(t, {0, 0, 1}) - Vec3(0, 0, 1)).norm() == 0.0);
  CHECK((camera_to_world(t, {2, 4, 0.5}) - Vec3(4, 8, 2)).norm() == 0.0);
  CHECK_THROWS_AS(camera_to_world(t, {0, 0, 0.0}), InvalidDisparity);
  CHECK_THROWS_AS(camera_to_world(t, {0, 0, -1.0}), InvalidDisparity);
}

TEST_CASE("world -> camera -> world round trip over random transforms") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  while (checked < 1000) {
    Mat4 m = Mat4::Identity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) m(r, c) += test::uniform(rng, -0.5, 0.5);
    }
    if (std::abs(m.determinant()) < 1e-3) continue;
    const auto t = PerspectiveTransform::from_matrix(m);
    CHECK(max_abs_diff(t.theta() * t.theta_inv(), Mat4::Identity()) < 1e-9);
    const Vec3 p(test::uniform(rng, -2, 2), test::uniform(rng, -2, 2),
                 test::uniform(rng, -2, 2));
    const Eigen::Vector4d h = m * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
    if (h.z() <= 1e-2) continue;  // point must lie in front of the camera
    const CameraPoint c = t.world_to_camera(p);
    CHECK(c.x == doctest::Approx(h.x() / h.z()).epsilon(1e-9));
    CHECK(c.disparity == doctest::Approx(1.0 / h.z()).epsilon(1e-9));
    CHECK((t.camera_to_world(c) - p).norm() < 1e-9);
    ++checked;
  }
}

TEST_CASE("default rig camera round trip") {
  const CameraIntrinsics k = build_intrinsics(default_focal(32), 32, 32);
  for (const Viewpoint& v : default_rig()) {
    const CameraView view = make_camera_view(v, k);
    CHECK(max_abs_diff(view.transform.theta() * view.transform.theta_inv(),
                       Mat4::Identity()) < 1e-9);
    // The look-at target projects to the principal point.
    const CameraPoint c = view.transform.world_to_camera(Vec3::Zero());
    CHECK(c.x == doctest::Approx(k.cx).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(k.cy).epsilon(1e-12));
    CHECK(c.disparity == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("image y grows toward world down") {
  const CameraIntrinsics k = build_intrinsics(default_focal(32), 32, 32);
  const CameraView view = make_camera_view(viewpoint_from_degrees(0, 0, 2), k);
  CHECK(view.transform.world_to_camera(Vec3(0, 0, 0.2)).y < k.cy);
  // Camera on +x looking at -x: world +y is to the camera's right.
  CHECK(view.transform.world_to_camera(Vec3(0, 0.2, 0)).x > k.cx);
}

TEST_CASE("disparity_range") {
  const DisparityRange a = disparity_range(3.0, 1.0);
  CHECK(a.d_min == 0.25);
  CHECK(a.d_max == 0.5);
  CHECK_THROWS_AS(disparity_range(2.0, 2.0), CameraInsideVolume);
  const DisparityRange b = disparity_range(make_viewpoint(0, 0, 2.5));
  const double r = std::sqrt(3.0) / 2;
  CHECK(b.d_min == doctest::Approx(1 / (2.5 + r)).epsilon(1e-15));
  CHECK(b.d_max == doctest::Approx(1 / (2.5 - r)).epsilon(1e-15));
  CHECK_THROWS_AS(disparity_range(make_viewpoint(0, 0, 0.8)), CameraInsideVolume);
}

TEST_CASE("slice_disparity") {
  const DisparityRange r{0.2, 0.6};
  CHECK(slice_disparity(r, 0, 5) == 0.2);
  CHECK(slice_disparity(r, 4, 5) == doctest::Approx(0.6));
  CHECK(slice_disparity(r, 2, 5) == doctest::Approx(0.4));
  CHECK(slice_disparity(r, 0, 1) == doctest::Approx(0.4));
}

TEST_CASE("build_sampling_grid: index-aligned camera reproduces voxel centers") {
  // Theta sends world points to camera coordinates equal to voxel indices,
  // with the depth axis shifted by one so disparity 1 lands on slice l = 0:
  // index = (x~, y~, z~ - 1).
  const Dims3 dims{4, 4, 4};
  Mat4 m = Mat4::Identity();
  m(0, 0) = 4;
  m(1, 1) = 4;
  m(2, 2) = 4;
  m(0, 3) = 1.5;
  m(1, 3) = 1.5;
  m(2, 3) = 2.5;
  const auto t = PerspectiveTransform::from_matrix(m);
  const SamplingGrid grid = build_sampling_grid(t, {4, 4, 2}, {0.25, 1.0}, dims);
  for (std::size_t n = 0; n < 4; ++n) {
    for (std::size_t mm = 0; mm < 4; ++mm) {
      const Vec3& p = grid.at(n, mm, 1);  // disparity 1
      CHECK(std::abs(p.x() - static_cast<double>(mm)) < 1e-12);
      CHECK(std::abs(p.y() - static_cast<double>(n)) < 1e-12);
      CHECK(std::abs(p.z()) < 1e-12);
      const Vec3& q = grid.at(n, mm, 0);  // disparity 1/4, z~ = 4
      CHECK(std::abs(q.x() - 4.0 * static_cast<double>(mm)) < 1e-12);
      CHECK(std::abs(q.z() - 3.0) < 1e-12);
    }
  }
}

TEST_CASE("build_sampling_grid: collapsed disparity range") {
  const auto t = PerspectiveTransform::from_matrix(Mat4::Identity());
  const SamplingGrid g = build_sampling_grid(t, {2, 2, 2}, {0.5, 0.5}, {4, 4, 4});
  CHECK(g.points.size() == 8);
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK((g.at(n, m, 0) - g.at(n, m, 1)).norm() == 0.0);
    }
  }
  CHECK_THROWS_AS(build_sampling_grid(t, {2, 2, 2}, {0.6, 0.5}, {4, 4, 4}),
                  InvalidDisparity);
}

TEST_CASE("build_sampling_grid agrees with per-point camera_to_world") {
  const Dims3 vdims{32, 32, 32};
  const CameraIntrinsics k = build_intrinsics(default_focal(32), 32, 32);
  std::mt19937_64 rng(5);
  for (const Viewpoint& v : default_rig()) {
    const CameraView view = make_camera_view(v, k);
    const SamplingGrid g = build_sampling_grid(view, 32, vdims);
    CHECK(g.points.size() == 32u * 32u * 32u);
    CHECK(g.range.d_min > 0.0);
    CHECK(g.range.d_min < g.range.d_max);
    for (int s = 0; s < 20; ++s) {
      const auto n = static_cast<std::size_t>(rng() % 32);
      const auto m = static_cast<std::size_t>(rng() % 32);
      const auto l = static_cast<std::size_t>(rng() % 32);
      const double d = view.range.d_min + (view.range.d_max - view.range.d_min) *
                                              static_cast<double>(l) / 31.0;
      const Vec3 world = camera_to_world(
          view.transform, {static_cast<double>(m), static_cast<double>(n), d});
      CHECK((g.at(n, m, l) - world_to_index(world, vdims)).norm() < 1e-9);
    }
  }
}

TEST_CASE("azimuth shift by 90 degrees equals a quarter-turn index permutation") {
  // Grid for azimuth a + 90 sampling V equals grid for azimuth a sampling
  // rotate90_z(V); so the point (x, y) of the former maps to the latter's
  // point after the same permutation rotate90_z applies to indices.
  const Dims3 dims{8, 8, 8};
  const CameraIntrinsics k = build_intrinsics(default_focal(16), 16, 16);
  for (double az : {0.0, 15.0, 40.0, 200.0}) {
    const SamplingGrid a =
        build_sampling_grid(make_camera_view(viewpoint_from_degrees(az, 30, 2), k), 8, dims);
    const SamplingGrid b = build_sampling_grid(
        make_camera_view(viewpoint_from_degrees(az + 90, 30, 2), k), 8, dims);
    // rotate90_z: out(n, m, l) = in(m, W-1-n, l). A sample point p of grid a in
    // out-index space reads in at (x, y) = (W-1-p.y, p.x).
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const Vec3& p = a.points[i];
      const Vec3 mapped(7.0 - p.y(), p.x(), p.z());
      CHECK((mapped - b.points[i]).norm() < 1e-9);
    }
  }
}

TEST_CASE("rig files") {
  std::istringstream in("# comment\n0 30 2\n\n15.5 30 2.25  # trailing\n");
  const auto rig = parse_rig(in);
  REQUIRE(rig.size() == 2);
  CHECK(azimuth_degrees(rig[1]) == doctest::Approx(15.5));
  CHECK(rig[1].distance == 2.25);

  std::istringstream bad("0 30 2\n15 30 2\n15 abc 2\n");
  try {
    parse_rig(bad);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  std::istringstream round(format_rig(default_rig()));
  const auto back = parse_rig(round);
  REQUIRE(back.size() == kDefaultViewCount);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].azimuth == doctest::Approx(default_rig()[i].azimuth).epsilon(1e-12));
  }
}

TEST_CASE("default rig") {
  const auto rig = default_rig();
  REQUIRE(rig.size() == 24);
  for (std::size_t i = 0; i < rig.size(); ++i) {
    CHECK(azimuth_degrees(rig[i]) == doctest::Approx(15.0 * static_cast<double>(i)));
    CHECK(rig[i].elevation == doctest::Approx(kPi / 6));
    CHECK(rig[i].distance == 2.0);
  }
  CHECK(default_focal(32) == doctest::Approx(0.86 * 32 * 2));
}

}  // TEST_SUITE
