#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "voxproj/frame.hpp"
#include "voxproj/geometry.hpp"
#include "voxproj/image.hpp"

namespace voxproj {

/// Occupancy field V in [0,1]^(H x W x D), (n, m, l) row-major.
struct VoxelGrid {
  Dims3 dims;
  std::vector<double> values;

  VoxelGrid() = default;
  explicit VoxelGrid(const Dims3& dims, double fill = 0.0);
  /// Throws ShapeError on a length mismatch, InvalidArgument on values
  /// outside [0, 1].
  VoxelGrid(const Dims3& dims, std::vector<double> values);

  double& at(std::size_t n, std::size_t m, std::size_t l) {
    return values[dims.index(n, m, l)];
  }
  double at(std::size_t n, std::size_t m, std::size_t l) const {
    return values[dims.index(n, m, l)];
  }
};

/// Gradient with respect to a VoxelGrid. Unbounded values.
struct VolumeGradient {
  Dims3 dims;
  std::vector<double> values;

  VolumeGradient() = default;
  explicit VolumeGradient(const Dims3& dims) : dims(dims), values(dims.count(), 0.0) {}
};

struct BinaryVolume {
  Dims3 dims;
  std::vector<std::uint8_t> values;  // 0 or 1

  BinaryVolume() = default;
  explicit BinaryVolume(const Dims3& dims, bool fill = false)
      : dims(dims), values(dims.count(), fill ? 1 : 0) {}

  bool at(std::size_t n, std::size_t m, std::size_t l) const {
    return values[dims.index(n, m, l)] != 0;
  }
  std::size_t occupied() const;
  VoxelGrid to_grid() const;
};

/// out[i] = V[i] >= threshold. threshold must lie in (0, 1).
BinaryVolume binarize(const VoxelGrid& v, double threshold = 0.5);

/// |A and B| / |A or B|; 1.0 when both are empty.
double iou(const BinaryVolume& a, const BinaryVolume& b);

enum class ShapeKind { cube, sphere, cross, chair, hollow_box };

/// Throws InvalidArgument for an unknown name.
ShapeKind parse_shape_kind(std::string_view name);
std::string_view shape_kind_name(ShapeKind kind);

// Fixed shape constants, world units unless noted.
inline constexpr double kSphereRadius = 0.35;
inline constexpr std::size_t kHollowWall = 2;  // voxels

/// Deterministic binary test shape; every dim must be >= 8.
VoxelGrid synth_shape(ShapeKind kind, const Dims3& dims);

/// Rotation about the vertical axis through the grid center by
/// quarter_turns * (-90 degrees): one turn maps world (x, y) to (y, -x),
/// i.e. clockwise seen from +z. Requires H == W.
VoxelGrid rotate90_z(const VoxelGrid& v, int quarter_turns);

/// Space carving: a voxel survives iff in every view its center projects
/// (nearest pixel) inside the image onto a foreground pixel (>= 0.5) with a
/// disparity inside the view's range.
BinaryVolume visual_hull(std::span<const Silhouette> silhouettes,
                         std::span<const CameraView> views, const Dims3& dims);

}  // namespace voxproj
