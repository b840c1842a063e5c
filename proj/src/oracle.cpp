#include "voxproj/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Core>

#include "voxproj/errors.hpp"
#include "voxproj/io.hpp"
#include "voxproj/projector.hpp"

namespace voxproj {

double voxel_world_size(const Dims3& dims) {
  return kWorldExtent / static_cast<double>(std::max({dims.h, dims.w, dims.d}));
}

Silhouette raytrace_silhouette(const BinaryVolume& v, const CameraView& view,
                               double step) {
  if (!(step > 0.0) || step > 0.5 * voxel_world_size(v.dims) * (1.0 + 1e-12)) {
    throw InvalidArgument("raytrace: step must be in (0, half a voxel]");
  }
  const std::size_t h = view.intrinsics.image_h;
  const std::size_t w = view.intrinsics.image_w;
  const double z_near = 1.0 / view.range.d_max;
  const double z_far = 1.0 / view.range.d_min;
  const auto steps = static_cast<long>(std::floor((z_far - z_near) / step));
  const Mat4& inv = view.transform.theta_inv();
  const Dims3& dims = v.dims;

  Silhouette out(h, w);
#pragma omp parallel for schedule(static)
  for (long px = 0; px < static_cast<long>(h * w); ++px) {
    const double col = static_cast<double>(static_cast<std::size_t>(px) % w);
    const double row = static_cast<double>(static_cast<std::size_t>(px) / w);
    bool hit = false;
    for (long s = 0; s <= steps && !hit; ++s) {
      const double z = z_near + step * static_cast<double>(s);
      const Eigen::Vector4d world = inv * Eigen::Vector4d(col * z, row * z, z, 1.0);
      const Vec3 idx = world_to_index(world.head<3>() / world.w(), dims);
      const double m = std::floor(idx.x() + 0.5);
      const double n = std::floor(idx.y() + 0.5);
      const double l = std::floor(idx.z() + 0.5);
      if (m < 0 || n < 0 || l < 0 || m >= static_cast<double>(dims.w) ||
          n >= static_cast<double>(dims.h) || l >= static_cast<double>(dims.d)) {
        continue;
      }
      hit = v.at(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                 static_cast<std::size_t>(l));
    }
    out.values[static_cast<std::size_t>(px)] = hit ? 1.0 : 0.0;
  }
  return out;
}

std::vector<std::size_t> probe_indices(const Dims3& dims,
                                       const FiniteDiffOptions& opts) {
  const std::size_t total = dims.count();
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (opts.max_probes == 0 || opts.max_probes >= total) return idx;
  // Partial Fisher-Yates with a fixed engine; the modulo bias is irrelevant
  // for picking probes.
  std::mt19937_64 rng(opts.seed);
  for (std::size_t i = 0; i < opts.max_probes; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(opts.max_probes);
  std::sort(idx.begin(), idx.end());
  return idx;
}

VolumeGradient finite_diff_loss_grad(const VoxelGrid& v, const ScalarLoss& loss,
                                     const FiniteDiffOptions& opts) {
  if (!(opts.h > 0.0)) throw InvalidArgument("finite differences: h must be > 0");
  VolumeGradient grad(v.dims);
  VoxelGrid probe = v;
  for (std::size_t i : probe_indices(v.dims, opts)) {
    const double x = v.values[i];
    probe.values[i] = x + opts.h;
    const double up = loss(probe);
    probe.values[i] = x - opts.h;
    const double down = loss(probe);
    probe.values[i] = x;
    grad.values[i] = (up - down) / (2.0 * opts.h);
  }
  return grad;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

namespace {

// Marks voxels that feed any pixel whose top-two gap is below tie_eps.
void mark_near_ties(const VoxelGrid& v, const SamplingGrid& grid, double tie_eps,
                    std::vector<char>& tied) {
  const CameraVolume u = resample(v, grid);
  const std::size_t depth = grid.out_dims.d;
  for (std::size_t px = 0; px < grid.out_dims.h * grid.out_dims.w; ++px) {
    if (depth < 2) break;
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (std::size_t l = 0; l < depth; ++l) {
      const double x = u.values[px * depth + l];
      if (x > first) {
        second = first;
        first = x;
      } else if (x > second) {
        second = x;
      }
    }
    if (first - second >= tie_eps) continue;
    for (std::size_t l = 0; l < depth; ++l) {
      const Stencil s = trilinear_stencil(grid.points[px * depth + l], v.dims);
      for (int k = 0; k < s.size; ++k) tied[s.index[static_cast<std::size_t>(k)]] = 1;
    }
  }
}

}  // namespace

GradCheckReport grad_check(const VoxelGrid& v,
                           std::span<const SamplingGrid> grids,
                           const DifferentiableLoss& loss,
                           const FiniteDiffOptions& opts, double tie_eps) {
  if (!(opts.h > 0.0)) throw InvalidArgument("grad_check: h must be > 0");
  const LossAndGradient analytic = loss(v);
  if (analytic.grad.dims != v.dims) {
    throw ShapeError("grad_check: loss gradient has the wrong shape");
  }

  std::vector<char> tied(v.dims.count(), 0);
  std::vector<ArgmaxMap> base;
  base.reserve(grids.size());
  for (const SamplingGrid& g : grids) {
    mark_near_ties(v, g, tie_eps, tied);
    base.push_back(project(v, g).argmax);
  }

  const auto flips = [&](const VoxelGrid& probe) {
    for (std::size_t k = 0; k < grids.size(); ++k) {
      if (!(project(probe, grids[k]).argmax == base[k])) return true;
    }
    return false;
  };

  GradCheckReport report;
  VoxelGrid probe = v;
  for (std::size_t i : probe_indices(v.dims, opts)) {
    const double x = v.values[i];
    probe.values[i] = x + opts.h;
    const double up = loss(probe).loss;
    bool skip = tied[i] != 0 || flips(probe);
    probe.values[i] = x - opts.h;
    const double down = loss(probe).loss;
    skip = skip || flips(probe);
    probe.values[i] = x;
    if (skip) {
      ++report.num_skipped_ties;
      continue;
    }
    const double numeric = (up - down) / (2.0 * opts.h);
    const double a = analytic.grad.values[i];
    report.max_abs_err = std::max(report.max_abs_err, std::abs(a - numeric));
    report.max_rel_err = std::max(report.max_rel_err, relative_error(a, numeric));
    ++report.num_compared;
  }
  return report;
}

std::string format_report(const GradCheckReport& r) {
  return "max_abs=" + format_double(r.max_abs_err) +
         " max_rel=" + format_double(r.max_rel_err) +
         " compared=" + std::to_string(r.num_compared) +
         " skipped=" + std::to_string(r.num_skipped_ties);
}

}  // namespace voxproj
