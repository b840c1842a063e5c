#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "voxproj/geometry.hpp"
#include "voxproj/image.hpp"
#include "voxproj/oracle.hpp"
#include "voxproj/volume.hpp"

namespace voxproj {

struct LossConfig {
  double lambda_proj = 1.0;
  double lambda_vol = 1.0;
};

/// Mean over views of the summed squared pixel residuals,
///   L = (1/n) sum_j || P(V; view j) - S_j ||^2.
LossAndGradient projection_loss(const VoxelGrid& v,
                                std::span<const Silhouette> silhouettes,
                                std::span<const SamplingGrid> grids);

/// || V - V_gt ||^2 with gradient 2 (V - V_gt).
LossAndGradient volume_loss(const VoxelGrid& v, const VoxelGrid& gt);

struct CombinedLoss {
  double total = 0.0;
  double proj = 0.0;
  double vol = 0.0;
  VolumeGradient grad;
};

/// lambda_proj * L_proj + lambda_vol * L_vol. Terms with a zero weight are
/// not evaluated. Throws MissingSupervision when lambda_vol > 0 and gt is
/// null.
CombinedLoss combined_loss(const VoxelGrid& v,
                           std::span<const Silhouette> silhouettes,
                           std::span<const SamplingGrid> grids,
                           const VoxelGrid* gt, const LossConfig& cfg);

struct AdamConfig {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  AdamState(const AdamConfig& cfg, std::size_t size);

  /// One bias-corrected Adam update of params in place.
  void step(std::span<double> params, std::span<const double> grad);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return step_count_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_count_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct ReconConfig {
  int iterations = 500;
  LossConfig loss{1.0, 0.0};
  AdamConfig adam;
  double init_logit = 0.0;
  std::vector<std::size_t> view_subset;  // empty selects every view
  std::uint64_t seed = 0;
};

struct LossRecord {
  int iter = 0;
  double total = 0.0;
  double proj = 0.0;
  double vol = 0.0;
};

struct ReconResult {
  VoxelGrid volume;
  std::vector<LossRecord> history;
};

/// Gradient descent on logits z with V = sigmoid(z). grids[k] must sample a
/// volume of shape `dims` for the view that produced silhouettes[k]. Throws
/// Divergence on a non-finite loss.
ReconResult reconstruct(std::span<const Silhouette> silhouettes,
                        std::span<const SamplingGrid> grids, const Dims3& dims,
                        const ReconConfig& cfg, const VoxelGrid* gt = nullptr);

/// Builds one sampling grid per view for a `depth`-slice camera volume.
std::vector<SamplingGrid> build_view_grids(std::span<const CameraView> views,
                                           std::size_t depth,
                                           const Dims3& volume_dims);

/// `iter,loss_total,loss_proj,loss_vol` followed by one row per iteration.
void write_loss_csv(std::ostream& out, std::span<const LossRecord> history);

}  // namespace voxproj
