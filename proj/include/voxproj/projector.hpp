#pragma once

// Perspective transformer: trilinear resampling of the world-frame volume
// into the camera-frame volume U, max-flattening over disparity, and the
// analytic backward pass.
//
// The functions in voxproj:: are OpenMP-parallel. voxproj::reference holds
// serial versions of the same kernels; both produce bit-identical results.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "voxproj/geometry.hpp"
#include "voxproj/image.hpp"
#include "voxproj/volume.hpp"

namespace voxproj {

/// Camera-frame volume U, (n', m', l') row-major.
struct CameraVolume {
  Dims3 dims;
  std::vector<double> values;

  double at(std::size_t n, std::size_t m, std::size_t l) const {
    return values[dims.index(n, m, l)];
  }
};

/// Per-pixel disparity slice that won the max, or kEmpty for all-zero columns.
struct ArgmaxMap {
  static constexpr std::int32_t kEmpty = -1;

  std::size_t h = 0;
  std::size_t w = 0;
  std::size_t depth = 0;
  std::vector<std::int32_t> slices;

  std::int32_t at(std::size_t n, std::size_t m) const { return slices[n * w + m]; }
  bool operator==(const ArgmaxMap&) const = default;
};

struct Projection {
  Silhouette silhouette;
  ArgmaxMap argmax;
};

/// One trilinear stencil: up to 8 (voxel index, weight) pairs with nonzero
/// kernel weight; out-of-range neighbors are dropped.
struct Stencil {
  std::array<std::size_t, 8> index{};
  std::array<double, 8> weight{};
  int size = 0;
};

/// k(x - m) k(y - n) k(z - l) with k(t) = max(0, 1 - |t|), point in index
/// coordinates (x = m, y = n, z = l).
Stencil trilinear_stencil(const Vec3& point, const Dims3& dims);

CameraVolume resample(const VoxelGrid& v, const SamplingGrid& grid);

/// Max over slices; ties go to the smallest slice index.
Projection flatten_max(const CameraVolume& u);

Projection project(const VoxelGrid& v, const SamplingGrid& grid);

/// Routes each pixel's upstream gradient into its argmax sample and then
/// into that sample's trilinear stencil. Throws InvalidArgument when the
/// argmax map or gradient image does not match the grid.
VolumeGradient project_backward(const VoxelGrid& v, const SamplingGrid& grid,
                                const ArgmaxMap& argmax,
                                const ImageGradient& upstream);

namespace reference {

CameraVolume resample(const VoxelGrid& v, const SamplingGrid& grid);
Projection flatten_max(const CameraVolume& u);
Projection project(const VoxelGrid& v, const SamplingGrid& grid);
VolumeGradient project_backward(const VoxelGrid& v, const SamplingGrid& grid,
                                const ArgmaxMap& argmax,
                                const ImageGradient& upstream);

}  // namespace reference

namespace detail {
void check_backward_args(const VoxelGrid& v, const SamplingGrid& grid,
                         const ArgmaxMap& argmax, const ImageGradient& upstream);
void check_resample_args(const VoxelGrid& v, const SamplingGrid& grid);
}  // namespace detail

}  // namespace voxproj
