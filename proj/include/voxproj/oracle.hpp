#pragma once

// Independent references for the projector: a nearest-voxel ray marcher and
// a central-difference gradient checker. Both are slow on purpose and share
// no code with the trilinear kernels.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "voxproj/geometry.hpp"
#include "voxproj/image.hpp"
#include "voxproj/volume.hpp"

namespace voxproj {

inline constexpr double kDefaultMarchStepVoxels = 0.25;

/// World size of the smallest voxel edge.
double voxel_world_size(const Dims3& dims);

/// Any-hit silhouette: each pixel's ray is marched in camera depth from
/// 1/d_max to 1/d_min by `step` world units with nearest-voxel lookup.
/// Throws InvalidArgument when step exceeds half a voxel.
Silhouette raytrace_silhouette(const BinaryVolume& v, const CameraView& view,
                               double step);

using ScalarLoss = std::function<double(const VoxelGrid&)>;

struct LossAndGradient {
  double loss = 0.0;
  VolumeGradient grad;
};
using DifferentiableLoss = std::function<LossAndGradient(const VoxelGrid&)>;

struct FiniteDiffOptions {
  double h = 1e-3;
  std::size_t max_probes = 0;  // 0 probes every voxel
  std::uint64_t seed = 0;      // picks the probe subset when max_probes > 0
};

/// Voxel indices probed under the given options, ascending.
std::vector<std::size_t> probe_indices(const Dims3& dims,
                                       const FiniteDiffOptions& opts);

/// Central differences (L(V + h e_i) - L(V - h e_i)) / 2h. Perturbed grids may
/// leave [0, 1] by h. Unprobed entries are zero.
VolumeGradient finite_diff_loss_grad(const VoxelGrid& v, const ScalarLoss& loss,
                                     const FiniteDiffOptions& opts);

struct GradCheckReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::size_t num_compared = 0;
  std::size_t num_skipped_ties = 0;
};

/// |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);

/// Compares the loss's analytic gradient against central differences.
/// A probed voxel is skipped as a tie when, for some view, a pixel whose
/// column it touches has a top-two gap below tie_eps, or when perturbing it
/// by +-h changes that view's argmax map.
GradCheckReport grad_check(const VoxelGrid& v,
                           std::span<const SamplingGrid> grids,
                           const DifferentiableLoss& loss,
                           const FiniteDiffOptions& opts, double tie_eps);

/// `max_abs=<v> max_rel=<v> compared=<n> skipped=<n>`
std::string format_report(const GradCheckReport& r);

}  // namespace voxproj
