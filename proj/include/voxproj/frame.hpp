#pragma once

// World <-> voxel-index convention shared by every module.
//
// The object lives in the cube [-0.5, 0.5]^3 regardless of resolution.
// Index order is (n, m, l) = (row, column, slice) and maps to world axes
// (y, x, z): voxel (n, m, l) has its center at
//   ((m + 0.5) / W - 0.5, (n + 0.5) / H - 0.5, (l + 0.5) / D - 0.5).
// Continuous index coordinates are stored as (x, y, z) = (m, n, l) so the
// trilinear kernel reads k(x - m) k(y - n) k(z - l).

#include <cstddef>

#include <Eigen/Core>

namespace voxproj {

using Vec3 = Eigen::Vector3d;

struct Dims3 {
  std::size_t h = 0;  // rows    (n, world y)
  std::size_t w = 0;  // columns (m, world x)
  std::size_t d = 0;  // slices  (l, world z)

  std::size_t count() const { return h * w * d; }
  std::size_t index(std::size_t n, std::size_t m, std::size_t l) const {
    return (n * w + m) * d + l;
  }
  bool operator==(const Dims3&) const = default;
};

inline constexpr double kWorldExtent = 1.0;

// World point -> continuous index coordinates (x = m, y = n, z = l).
inline Vec3 world_to_index(const Vec3& world, const Dims3& dims) {
  return {(world.x() / kWorldExtent + 0.5) * static_cast<double>(dims.w) - 0.5,
          (world.y() / kWorldExtent + 0.5) * static_cast<double>(dims.h) - 0.5,
          (world.z() / kWorldExtent + 0.5) * static_cast<double>(dims.d) - 0.5};
}

inline Vec3 index_to_world(const Vec3& index, const Dims3& dims) {
  return {((index.x() + 0.5) / static_cast<double>(dims.w) - 0.5) * kWorldExtent,
          ((index.y() + 0.5) / static_cast<double>(dims.h) - 0.5) * kWorldExtent,
          ((index.z() + 0.5) / static_cast<double>(dims.d) - 0.5) * kWorldExtent};
}

inline Vec3 voxel_center(std::size_t n, std::size_t m, std::size_t l,
                         const Dims3& dims) {
  return index_to_world(
      Vec3(static_cast<double>(m), static_cast<double>(n), static_cast<double>(l)),
      dims);
}

}  // namespace voxproj
