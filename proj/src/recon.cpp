#include "voxproj/recon.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "voxproj/errors.hpp"
#include "voxproj/io.hpp"
#include "voxproj/projector.hpp"

namespace voxproj {

LossAndGradient projection_loss(const VoxelGrid& v,
                                std::span<const Silhouette> silhouettes,
                                std::span<const SamplingGrid> grids) {
  if (silhouettes.size() != grids.size()) {
    throw ShapeError("projection_loss: silhouette count != grid count");
  }
  if (grids.empty()) throw InvalidArgument("projection_loss: need >= 1 view");

  const double inv_n = 1.0 / static_cast<double>(grids.size());
  LossAndGradient out{0.0, VolumeGradient(v.dims)};
  // Views are accumulated in ascending order; the kernels parallelize inside.
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const Silhouette& target = silhouettes[k];
    const Projection p = project(v, grids[k]);
    if (!p.silhouette.same_shape(target)) {
      throw ShapeError("projection_loss: silhouette " + std::to_string(k) +
                       " does not match the sampling grid image size");
    }
    ImageGradient upstream(target.h, target.w);
    double sq = 0.0;
    for (std::size_t i = 0; i < target.values.size(); ++i) {
      const double r = p.silhouette.values[i] - target.values[i];
      sq += r * r;
      upstream.values[i] = 2.0 * r * inv_n;
    }
    out.loss += sq;
    const VolumeGradient g = project_backward(v, grids[k], p.argmax, upstream);
    for (std::size_t i = 0; i < g.values.size(); ++i) out.grad.values[i] += g.values[i];
  }
  out.loss *= inv_n;
  return out;
}

LossAndGradient volume_loss(const VoxelGrid& v, const VoxelGrid& gt) {
  if (v.dims != gt.dims) throw ShapeError("volume_loss: dimensions differ");
  LossAndGradient out{0.0, VolumeGradient(v.dims)};
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const double r = v.values[i] - gt.values[i];
    out.loss += r * r;
    out.grad.values[i] = 2.0 * r;
  }
  return out;
}

CombinedLoss combined_loss(const VoxelGrid& v,
                           std::span<const Silhouette> silhouettes,
                           std::span<const SamplingGrid> grids,
                           const VoxelGrid* gt, const LossConfig& cfg) {
  if (cfg.lambda_proj < 0.0 || cfg.lambda_vol < 0.0 ||
      !(cfg.lambda_proj + cfg.lambda_vol > 0.0)) {
    throw InvalidArgument("loss weights must be >= 0 with a positive sum");
  }
  if (cfg.lambda_vol > 0.0 && gt == nullptr) {
    throw MissingSupervision("lambda_vol > 0 requires a ground-truth volume");
  }
  CombinedLoss out;
  out.grad = VolumeGradient(v.dims);
  if (cfg.lambda_proj > 0.0) {
    const LossAndGradient p = projection_loss(v, silhouettes, grids);
    out.proj = p.loss;
    for (std::size_t i = 0; i < p.grad.values.size(); ++i) {
      out.grad.values[i] += cfg.lambda_proj * p.grad.values[i];
    }
  }
  if (cfg.lambda_vol > 0.0) {
    const LossAndGradient vol = volume_loss(v, *gt);
    out.vol = vol.loss;
    for (std::size_t i = 0; i < vol.grad.values.size(); ++i) {
      out.grad.values[i] += cfg.lambda_vol * vol.grad.values[i];
    }
  }
  out.total = cfg.lambda_proj * out.proj + cfg.lambda_vol * out.vol;
  return out;
}

AdamState::AdamState(const AdamConfig& cfg, std::size_t size)
    : cfg_(cfg), m_(size, 0.0), v_(size, 0.0) {
  if (!(cfg.lr > 0.0) || !(cfg.eps > 0.0) || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 ||
      cfg.beta2 < 0.0 || cfg.beta2 >= 1.0) {
    throw InvalidArgument("adam: need lr, eps > 0 and betas in [0, 1)");
  }
}

void AdamState::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ShapeError("adam: parameter/gradient size mismatch");
  }
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t);
  const auto n = static_cast<long>(params.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double g = grad[i];
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
  }
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

ReconResult reconstruct(std::span<const Silhouette> silhouettes,
                        std::span<const SamplingGrid> grids, const Dims3& dims,
                        const ReconConfig& cfg, const VoxelGrid* gt) {
  if (cfg.iterations < 1) throw InvalidArgument("reconstruct: iterations must be >= 1");
  if (silhouettes.size() != grids.size()) {
    throw ShapeError("reconstruct: silhouette count != view count");
  }
  std::vector<std::size_t> subset = cfg.view_subset;
  if (subset.empty()) {
    for (std::size_t k = 0; k < grids.size(); ++k) subset.push_back(k);
  }
  if (subset.empty()) throw InvalidArgument("reconstruct: no views selected");
  std::vector<Silhouette> sel_sils;
  std::vector<SamplingGrid> sel_grids;
  for (std::size_t k : subset) {
    if (k >= grids.size()) {
      throw InvalidArgument("reconstruct: view index " + std::to_string(k) + " out of range");
    }
    if (grids[k].volume_dims != dims) {
      throw ShapeError("reconstruct: sampling grid built for a different volume");
    }
    sel_sils.push_back(silhouettes[k]);
    sel_grids.push_back(grids[k]);
  }
  if (gt != nullptr && gt->dims != dims) {
    throw ShapeError("reconstruct: ground truth has different dimensions");
  }

  std::vector<double> logits(dims.count(), cfg.init_logit);
  std::vector<double> dz(dims.count(), 0.0);
  AdamState adam(cfg.adam, logits.size());
  VoxelGrid v(dims);
  const auto count = static_cast<long>(logits.size());

  ReconResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int it = 0; it < cfg.iterations; ++it) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < count; ++j) {
      v.values[static_cast<std::size_t>(j)] = sigmoid(logits[static_cast<std::size_t>(j)]);
    }
    const CombinedLoss loss = combined_loss(v, sel_sils, sel_grids, gt, cfg.loss);
    if (!std::isfinite(loss.total)) {
      throw Divergence("reconstruct: non-finite loss at iteration " + std::to_string(it), it);
    }
    result.history.push_back({it, loss.total, loss.proj, loss.vol});
#pragma omp parallel for schedule(static)
    for (long j = 0; j < count; ++j) {
      const auto i = static_cast<std::size_t>(j);
      dz[i] = loss.grad.values[i] * v.values[i] * (1.0 - v.values[i]);
    }
    adam.step(logits, dz);
  }
  for (std::size_t i = 0; i < logits.size(); ++i) v.values[i] = sigmoid(logits[i]);
  result.volume = std::move(v);
  return result;
}

std::vector<SamplingGrid> build_view_grids(std::span<const CameraView> views,
                                           std::size_t depth,
                                           const Dims3& volume_dims) {
  std::vector<SamplingGrid> grids;
  grids.reserve(views.size());
  for (const CameraView& view : views) {
    grids.push_back(build_sampling_grid(view, depth, volume_dims));
  }
  return grids;
}

void write_loss_csv(std::ostream& out, std::span<const LossRecord> history) {
  out << "iter,loss_total,loss_proj,loss_vol\n";
  for (const LossRecord& r : history) {
    out << r.iter << ',' << format_double(r.total) << ',' << format_double(r.proj)
        << ',' << format_double(r.vol) << '\n';
  }
}

}  // namespace voxproj
