#include "voxproj/projector.hpp"

#include <cmath>

#include "voxproj/errors.hpp"

namespace voxproj {

Stencil trilinear_stencil(const Vec3& point, const Dims3& dims) {
  Stencil s;
  const double fx0 = std::floor(point.x());
  const double fy0 = std::floor(point.y());
  const double fz0 = std::floor(point.z());
  const double tx = point.x() - fx0;
  const double ty = point.y() - fy0;
  const double tz = point.z() - fz0;
  const double wx[2] = {1.0 - tx, tx};
  const double wy[2] = {1.0 - ty, ty};
  const double wz[2] = {1.0 - tz, tz};
  for (int dn = 0; dn < 2; ++dn) {
    const double n = fy0 + dn;
    if (n < 0.0 || n >= static_cast<double>(dims.h) || wy[dn] == 0.0) continue;
    for (int dm = 0; dm < 2; ++dm) {
      const double m = fx0 + dm;
      if (m < 0.0 || m >= static_cast<double>(dims.w) || wx[dm] == 0.0) continue;
      for (int dl = 0; dl < 2; ++dl) {
        const double l = fz0 + dl;
        if (l < 0.0 || l >= static_cast<double>(dims.d) || wz[dl] == 0.0) continue;
        s.index[static_cast<std::size_t>(s.size)] =
            dims.index(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                       static_cast<std::size_t>(l));
        s.weight[static_cast<std::size_t>(s.size)] = wy[dn] * wx[dm] * wz[dl];
        ++s.size;
      }
    }
  }
  return s;
}

namespace detail {

void check_resample_args(const VoxelGrid& v, const SamplingGrid& grid) {
  if (v.dims != grid.volume_dims || v.values.size() != v.dims.count()) {
    throw ShapeError("sampling grid was built for a different volume shape");
  }
  if (grid.points.size() != grid.out_dims.count()) {
    throw ShapeError("sampling grid point count does not match its dims");
  }
}

void check_backward_args(const VoxelGrid& v, const SamplingGrid& grid,
                         const ArgmaxMap& argmax, const ImageGradient& upstream) {
  check_resample_args(v, grid);
  if (argmax.h != grid.out_dims.h || argmax.w != grid.out_dims.w ||
      argmax.depth != grid.out_dims.d || argmax.slices.size() != argmax.h * argmax.w) {
    throw InvalidArgument("stale argmax map: shape differs from sampling grid");
  }
  if (upstream.h != grid.out_dims.h || upstream.w != grid.out_dims.w ||
      upstream.values.size() != upstream.h * upstream.w) {
    throw InvalidArgument("upstream gradient shape differs from sampling grid");
  }
}

}  // namespace detail

namespace {

inline double gather(const VoxelGrid& v, const Vec3& p) {
  const Stencil s = trilinear_stencil(p, v.dims);
  double acc = 0.0;
  for (int k = 0; k < s.size; ++k) {
    acc += s.weight[static_cast<std::size_t>(k)] * v.values[s.index[static_cast<std::size_t>(k)]];
  }
  return acc;
}

inline void flatten_column(const CameraVolume& u, std::size_t pixel,
                           double& value, std::int32_t& slice) {
  const std::size_t depth = u.dims.d;
  const double* col = u.values.data() + pixel * depth;
  double best = col[0];
  std::int32_t arg = 0;
  for (std::size_t l = 1; l < depth; ++l) {
    if (col[l] > best) {
      best = col[l];
      arg = static_cast<std::int32_t>(l);
    }
  }
  if (best == 0.0) {
    bool all_zero = true;
    for (std::size_t l = 0; l < depth; ++l) all_zero = all_zero && col[l] == 0.0;
    if (all_zero) arg = ArgmaxMap::kEmpty;
  }
  value = best;
  slice = arg;
}

}  // namespace

CameraVolume resample(const VoxelGrid& v, const SamplingGrid& grid) {
  detail::check_resample_args(v, grid);
  CameraVolume u{grid.out_dims, std::vector<double>(grid.points.size())};
  const auto total = static_cast<long>(grid.points.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    u.values[static_cast<std::size_t>(i)] = gather(v, grid.points[static_cast<std::size_t>(i)]);
  }
  return u;
}

Projection flatten_max(const CameraVolume& u) {
  if (u.dims.d < 1) throw InvalidArgument("flatten_max: depth must be >= 1");
  Projection p;
  p.silhouette = Silhouette(u.dims.h, u.dims.w);
  p.argmax = ArgmaxMap{u.dims.h, u.dims.w, u.dims.d,
                       std::vector<std::int32_t>(u.dims.h * u.dims.w)};
  const auto pixels = static_cast<long>(u.dims.h * u.dims.w);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < pixels; ++i) {
    const auto px = static_cast<std::size_t>(i);
    flatten_column(u, px, p.silhouette.values[px], p.argmax.slices[px]);
  }
  return p;
}

Projection project(const VoxelGrid& v, const SamplingGrid& grid) {
  return flatten_max(resample(v, grid));
}

VolumeGradient project_backward(const VoxelGrid& v, const SamplingGrid& grid,
                                const ArgmaxMap& argmax,
                                const ImageGradient& upstream) {
  detail::check_backward_args(v, grid, argmax, upstream);
  const std::size_t pixels = argmax.h * argmax.w;
  const std::size_t depth = grid.out_dims.d;

  // Stencils are built in parallel; the scatter runs in pixel order so the
  // floating-point sum is identical to the serial kernel.
  std::vector<Stencil> stencils(pixels);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(pixels); ++i) {
    const auto px = static_cast<std::size_t>(i);
    const std::int32_t slice = argmax.slices[px];
    if (slice == ArgmaxMap::kEmpty || upstream.values[px] == 0.0) continue;
    stencils[px] = trilinear_stencil(
        grid.points[px * depth + static_cast<std::size_t>(slice)], v.dims);
  }

  VolumeGradient grad(v.dims);
  for (std::size_t px = 0; px < pixels; ++px) {
    const Stencil& s = stencils[px];
    const double g = upstream.values[px];
    for (int k = 0; k < s.size; ++k) {
      grad.values[s.index[static_cast<std::size_t>(k)]] += g * s.weight[static_cast<std::size_t>(k)];
    }
  }
  return grad;
}

}  // namespace voxproj
