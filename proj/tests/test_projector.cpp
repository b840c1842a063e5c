#include <doctest.h>

#include <random>

#include "support/brute_force.hpp"
#include "voxproj/errors.hpp"
#include "voxproj/geometry.hpp"
#include "voxproj/projector.hpp"
#include "voxproj/volume.hpp"

using namespace voxproj;

namespace {

// A sampling grid holding arbitrary index-space points.
SamplingGrid point_grid(const Dims3& out, const Dims3& vol, std::vector<Vec3> pts) {
  SamplingGrid g;
  g.out_dims = out;
  g.volume_dims = vol;
  g.range = {1.0, 1.0};
  g.points = std::move(pts);
  return g;
}

SamplingGrid identity_grid(const Dims3& dims) {
  std::vector<Vec3> pts;
  for (std::size_t n = 0; n < dims.h; ++n)
    for (std::size_t m = 0; m < dims.w; ++m)
      for (std::size_t l = 0; l < dims.d; ++l)
        pts.emplace_back(static_cast<double>(m), static_cast<double>(n),
                         static_cast<double>(l));
  return point_grid(dims, dims, std::move(pts));
}

SamplingGrid view_grid(double az_deg, std::size_t image, std::size_t depth,
                       const Dims3& dims) {
  const CameraIntrinsics k = build_intrinsics(default_focal(image), image, image);
  return build_sampling_grid(make_camera_view(viewpoint_from_degrees(az_deg, 30, 2), k),
                             depth, dims);
}

CameraVolume column(std::vector<double> values) {
  CameraVolume u;
  u.dims = {1, 1, values.size()};
  u.values = std::move(values);
  return u;
}

}  // namespace

TEST_SUITE("projector") {

TEST_CASE("trilinear stencil weights") {
  const Dims3 dims{4, 4, 4};
  const Stencil on = trilinear_stencil(Vec3(1, 2, 3), dims);
  REQUIRE(on.size == 1);
  CHECK(on.index[0] == dims.index(2, 1, 3));
  CHECK(on.weight[0] == 1.0);

  const Stencil mid = trilinear_stencil(Vec3(1.5, 2.25, 0.5), dims);
  double total = 0.0;
  for (int i = 0; i < mid.size; ++i) total += mid.weight[i];
  CHECK(mid.size == 8);
  CHECK(total == doctest::Approx(1.0));

  CHECK(trilinear_stencil(Vec3(-1.0, 0, 0), dims).size == 0);
  CHECK(trilinear_stencil(Vec3(4.0, 0, 0), dims).size == 0);
  const Stencil edge = trilinear_stencil(Vec3(-0.25, 0, 0), dims);
  REQUIRE(edge.size == 1);
  CHECK(edge.weight[0] == doctest::Approx(0.75));
}

TEST_CASE("resample: identity grid reproduces the volume") {
  std::mt19937_64 rng(1);
  const VoxelGrid v = test::random_grid({3, 4, 5}, rng);
  CHECK(resample(v, identity_grid(v.dims)).values == v.values);
}

TEST_CASE("resample: midpoint between 0 and 1 is 0.5") {
  VoxelGrid v({2, 2, 2});
  v.at(0, 1, 0) = 1.0;
  const auto u = resample(v, point_grid({1, 1, 1}, v.dims, {Vec3(0.5, 0, 0)}));
  CHECK(u.values[0] == 0.5);
}

TEST_CASE("resample matches the brute-force triple sum") {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (std::size_t h = 1; h <= 6; ++h) {
    for (std::size_t w = 1; w <= 6; ++w) {
      for (std::size_t d = 1; d <= 6; ++d) {
        const Dims3 dims{h, w, d};
        const VoxelGrid v = test::random_grid(dims, rng);
        std::vector<Vec3> pts;
        for (int i = 0; i < 4; ++i) {
          // Include points up to 1.5 voxels outside the grid.
          pts.emplace_back(test::uniform(rng, -1.5, static_cast<double>(w) + 0.5),
                           test::uniform(rng, -1.5, static_cast<double>(h) + 0.5),
                           test::uniform(rng, -1.5, static_cast<double>(d) + 0.5));
        }
        const auto u = resample(v, point_grid({2, 2, 1}, dims, pts));
        for (std::size_t i = 0; i < pts.size(); ++i) {
          worst = std::max(worst, std::abs(u.values[i] - test::brute_force_sample(v, pts[i])));
        }
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("flatten_max") {
  SUBCASE("all zero") {
    CameraVolume u;
    u.dims = {2, 3, 4};
    u.values.assign(24, 0.0);
    const Projection p = flatten_max(u);
    for (double x : p.silhouette.values) CHECK(x == 0.0);
    for (auto s : p.argmax.slices) CHECK(s == ArgmaxMap::kEmpty);
  }
  SUBCASE("single slice") {
    CameraVolume u;
    u.dims = {2, 2, 1};
    u.values = {0.1, 0.2, 0.3, 0.4};
    const Projection p = flatten_max(u);
    CHECK(p.silhouette.values == u.values);
    for (auto s : p.argmax.slices) CHECK(s == 0);
  }
  SUBCASE("ties go to the first maximum") {
    const Projection p = flatten_max(column({0.2, 0.9, 0.9}));
    CHECK(p.silhouette.values[0] == 0.9);
    CHECK(p.argmax.at(0, 0) == 1);
  }
}

TEST_CASE("project: empty volume gives an empty silhouette") {
  const Dims3 dims{16, 16, 16};
  const Projection p = project(VoxelGrid(dims), view_grid(45, 32, 32, dims));
  for (double x : p.silhouette.values) CHECK(x == 0.0);
}

TEST_CASE("project: sphere silhouette is a centered disc") {
  const Dims3 dims{16, 16, 16};
  const VoxelGrid sphere = synth_shape(ShapeKind::sphere, dims);
  for (double az : {0.0, 15.0, 105.0, 270.0}) {
    const Silhouette s = project(sphere, view_grid(az, 32, 32, dims)).silhouette;
    CHECK(s.at(16, 16) > 0.99);
    CHECK(s.at(0, 0) == 0.0);
    CHECK(s.at(31, 31) == 0.0);
    // Rows fill contiguously.
    for (std::size_t n = 0; n < 32; ++n) {
      int changes = 0;
      for (std::size_t m = 1; m < 32; ++m) {
        changes += (s.at(n, m) >= 0.5) != (s.at(n, m - 1) >= 0.5) ? 1 : 0;
      }
      CHECK(changes <= 2);
    }
  }
}

TEST_CASE("project: a single central voxel projects to one blob at the principal point") {
  const Dims3 dims{9, 9, 9};
  VoxelGrid v(dims);
  v.at(4, 4, 4) = 1.0;
  for (double az : {0.0, 30.0, 200.0}) {
    const Silhouette s = project(v, view_grid(az, 31, 64, dims)).silhouette;
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.values.size(); ++i) {
      if (s.values[i] > s.values[best]) best = i;
    }
    CHECK(best == 15 * 31 + 15);
    // Foreground stays within a few pixels of the center.
    for (std::size_t n = 0; n < 31; ++n)
      for (std::size_t m = 0; m < 31; ++m)
        if (s.at(n, m) > 0.0) {
          CHECK(std::abs(static_cast<double>(n) - 15.0) <= 4.0);
          CHECK(std::abs(static_cast<double>(m) - 15.0) <= 4.0);
        }
  }
}

TEST_CASE("range preservation and monotonicity") {
  std::mt19937_64 rng(17);
  const Dims3 dims{6, 6, 6};
  const SamplingGrid g = view_grid(30, 8, 8, dims);
  for (int t = 0; t < 10; ++t) {
    VoxelGrid v = test::random_grid(dims, rng);
    const CameraVolume u = resample(v, g);
    for (double x : u.values) CHECK((x >= 0.0 && x <= 1.0));
    const Silhouette before = flatten_max(u).silhouette;
    const std::size_t i = static_cast<std::size_t>(rng() % dims.count());
    v.values[i] = std::min(1.0, v.values[i] + test::uniform(rng, 0.0, 0.5));
    const Silhouette after = project(v, g).silhouette;
    for (std::size_t p = 0; p < before.values.size(); ++p) {
      CHECK(after.values[p] >= before.values[p]);
    }
  }
}

TEST_CASE("resample is linear") {
  std::mt19937_64 rng(23);
  const Dims3 dims{6, 6, 6};
  const SamplingGrid g = view_grid(75, 8, 8, dims);
  const VoxelGrid a = test::random_grid(dims, rng);
  const VoxelGrid b = test::random_grid(dims, rng);
  const double x = 0.3;
  const double y = 0.6;
  VoxelGrid mix(dims);
  for (std::size_t i = 0; i < mix.values.size(); ++i) {
    mix.values[i] = x * a.values[i] + y * b.values[i];
  }
  const auto ua = resample(a, g);
  const auto ub = resample(b, g);
  const auto um = resample(mix, g);
  for (std::size_t i = 0; i < um.values.size(); ++i) {
    CHECK(std::abs(um.values[i] - (x * ua.values[i] + y * ub.values[i])) < 1e-12);
  }
}

TEST_CASE("azimuth consistency under a quarter turn") {
  std::mt19937_64 rng(31);
  const Dims3 dims{8, 8, 8};
  const VoxelGrid v = test::random_grid(dims, rng);
  const VoxelGrid chair = synth_shape(ShapeKind::chair, dims);
  for (double az : {0.0, 15.0, 120.0}) {
    for (const VoxelGrid* vol : {&v, &chair}) {
      const Silhouette a = project(rotate90_z(*vol, 1), view_grid(az, 16, 16, dims)).silhouette;
      const Silhouette b = project(*vol, view_grid(az + 90, 16, 16, dims)).silhouette;
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-6);
      }
    }
  }
}

TEST_CASE("backward: hand examples") {
  const Dims3 dims{3, 3, 3};
  std::mt19937_64 rng(5);
  const VoxelGrid v = test::random_grid(dims, rng);
  const SamplingGrid g = identity_grid(dims);
  const Projection p = project(v, g);

  const VolumeGradient zero = project_backward(v, g, p.argmax, ImageGradient(3, 3));
  for (double x : zero.values) CHECK(x == 0.0);

  ImageGradient up(3, 3);
  up.at(1, 2) = 1.0;
  const VolumeGradient one = project_backward(v, g, p.argmax, up);
  const auto l = static_cast<std::size_t>(p.argmax.at(1, 2));
  for (std::size_t i = 0; i < one.values.size(); ++i) {
    CHECK(one.values[i] == (i == dims.index(1, 2, l) ? 1.0 : 0.0));
  }
}

TEST_CASE("backward: sentinel pixels propagate nothing") {
  const Dims3 dims{4, 4, 4};
  const VoxelGrid v(dims);
  const SamplingGrid g = view_grid(0, 6, 6, dims);
  const Projection p = project(v, g);
  const VolumeGradient grad = project_backward(v, g, p.argmax, ImageGradient(6, 6, 1.0));
  for (double x : grad.values) CHECK(x == 0.0);
}

TEST_CASE("backward: stale or mismatched inputs") {
  const Dims3 dims{4, 4, 4};
  const VoxelGrid v(dims, 0.5);
  const SamplingGrid g = view_grid(0, 6, 6, dims);
  const SamplingGrid other = view_grid(0, 5, 6, dims);
  const Projection stale = project(v, other);
  CHECK_THROWS_AS(project_backward(v, g, stale.argmax, ImageGradient(6, 6)), InvalidArgument);
  const Projection p = project(v, g);
  CHECK_THROWS_AS(project_backward(v, g, p.argmax, ImageGradient(5, 6)), InvalidArgument);
  CHECK_THROWS_AS(project(VoxelGrid({5, 4, 4}), g), ShapeError);
}

TEST_CASE("backward is the adjoint of the linearized forward pass") {
  // With argmax fixed, S is linear in V: <g, S(V)> == <backward(g), V>.
  std::mt19937_64 rng(41);
  const Dims3 dims{5, 5, 5};
  const SamplingGrid g = view_grid(60, 6, 7, dims);
  const VoxelGrid v = test::random_grid(dims, rng);
  const Projection p = project(v, g);
  ImageGradient up(6, 6);
  for (double& x : up.values) x = test::uniform(rng, -1, 1);
  const VolumeGradient grad = project_backward(v, g, p.argmax, up);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < up.values.size(); ++i) lhs += up.values[i] * p.silhouette.values[i];
  for (std::size_t i = 0; i < v.values.size(); ++i) rhs += grad.values[i] * v.values[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  std::mt19937_64 rng(77);
  const Dims3 dims{12, 12, 12};
  const VoxelGrid v = test::random_grid(dims, rng);
  for (double az : {0.0, 45.0, 300.0}) {
    const SamplingGrid g = view_grid(az, 16, 16, dims);
    const CameraVolume u = resample(v, g);
    CHECK(u.values == reference::resample(v, g).values);
    const Projection p = flatten_max(u);
    const Projection r = reference::flatten_max(u);
    CHECK(p.silhouette.values == r.silhouette.values);
    CHECK(p.argmax == r.argmax);
    ImageGradient up(16, 16);
    for (double& x : up.values) x = test::uniform(rng, -1, 1);
    CHECK(project_backward(v, g, p.argmax, up).values ==
          reference::project_backward(v, g, p.argmax, up).values);
  }
}

TEST_CASE("repeated runs are bit-identical") {
  std::mt19937_64 rng(88);
  const Dims3 dims{10, 10, 10};
  const VoxelGrid v = test::random_grid(dims, rng);
  const SamplingGrid g = view_grid(33, 12, 12, dims);
  const Projection a = project(v, g);
  const Projection b = project(v, g);
  CHECK(a.silhouette.values == b.silhouette.values);
  ImageGradient up(12, 12, 0.5);
  CHECK(project_backward(v, g, a.argmax, up).values ==
        project_backward(v, g, b.argmax, up).values);
}

}  // TEST_SUITE
