#include <cstddef>

#include "voxproj/errors.hpp"
#include "voxproj/projector.hpp"

namespace voxproj::reference {

CameraVolume resample(const VoxelGrid& v, const SamplingGrid& grid) {
  detail::check_resample_args(v, grid);
  CameraVolume u{grid.out_dims, std::vector<double>(grid.points.size(), 0.0)};
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const Stencil s = trilinear_stencil(grid.points[i], v.dims);
    double acc = 0.0;
    for (int k = 0; k < s.size; ++k) {
      const auto j = static_cast<std::size_t>(k);
      acc += s.weight[j] * v.values[s.index[j]];
    }
    u.values[i] = acc;
  }
  return u;
}

Projection flatten_max(const CameraVolume& u) {
  if (u.dims.d < 1) throw InvalidArgument("flatten_max: depth must be >= 1");
  Projection p;
  p.silhouette = Silhouette(u.dims.h, u.dims.w);
  p.argmax = ArgmaxMap{u.dims.h, u.dims.w, u.dims.d,
                       std::vector<std::int32_t>(u.dims.h * u.dims.w, ArgmaxMap::kEmpty)};
  for (std::size_t n = 0; n < u.dims.h; ++n) {
    for (std::size_t m = 0; m < u.dims.w; ++m) {
      double best = u.at(n, m, 0);
      std::int32_t arg = 0;
      bool all_zero = best == 0.0;
      for (std::size_t l = 1; l < u.dims.d; ++l) {
        const double x = u.at(n, m, l);
        all_zero = all_zero && x == 0.0;
        if (x > best) {
          best = x;
          arg = static_cast<std::int32_t>(l);
        }
      }
      p.silhouette.at(n, m) = best;
      p.argmax.slices[n * u.dims.w + m] = all_zero ? ArgmaxMap::kEmpty : arg;
    }
  }
  return p;
}

Projection project(const VoxelGrid& v, const SamplingGrid& grid) {
  return reference::flatten_max(reference::resample(v, grid));
}

VolumeGradient project_backward(const VoxelGrid& v, const SamplingGrid& grid,
                                const ArgmaxMap& argmax,
                                const ImageGradient& upstream) {
  detail::check_backward_args(v, grid, argmax, upstream);
  VolumeGradient grad(v.dims);
  for (std::size_t n = 0; n < argmax.h; ++n) {
    for (std::size_t m = 0; m < argmax.w; ++m) {
      const std::int32_t slice = argmax.at(n, m);
      const double g = upstream.at(n, m);
      if (slice == ArgmaxMap::kEmpty || g == 0.0) continue;
      const Stencil s = trilinear_stencil(
          grid.at(n, m, static_cast<std::size_t>(slice)), v.dims);
      for (int k = 0; k < s.size; ++k) {
        const auto j = static_cast<std::size_t>(k);
        grad.values[s.index[j]] += g * s.weight[j];
      }
    }
  }
  return grad;
}

}  // namespace voxproj::reference
