#pragma once

#include <cstddef>
#include <vector>

namespace voxproj {

/// Row-major 2D real image. Silhouettes hold foreground probabilities in
/// [0, 1]; the same layout carries image-shaped gradients.
struct Image {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> values;

  Image() = default;
  Image(std::size_t h, std::size_t w, double fill = 0.0)
      : h(h), w(w), values(h * w, fill) {}

  double& at(std::size_t n, std::size_t m) { return values[n * w + m]; }
  double at(std::size_t n, std::size_t m) const { return values[n * w + m]; }
  bool same_shape(const Image& o) const { return h == o.h && w == o.w; }
};

using Silhouette = Image;
using ImageGradient = Image;

}  // namespace voxproj
