#include "voxproj/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxproj/errors.hpp"

namespace voxproj {

VoxelGrid::VoxelGrid(const Dims3& dims, double fill)
    : dims(dims), values(dims.count(), fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw InvalidArgument("voxel grid: fill value outside [0, 1]");
  }
}

VoxelGrid::VoxelGrid(const Dims3& dims, std::vector<double> vals)
    : dims(dims), values(std::move(vals)) {
  if (values.size() != dims.count()) {
    throw ShapeError("voxel grid: data length does not match dims");
  }
  for (double x : values) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InvalidArgument("voxel grid: occupancy outside [0, 1]");
    }
  }
}

std::size_t BinaryVolume::occupied() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), 1));
}

VoxelGrid BinaryVolume::to_grid() const {
  VoxelGrid g(dims);
  for (std::size_t i = 0; i < values.size(); ++i) g.values[i] = values[i] ? 1.0 : 0.0;
  return g;
}

BinaryVolume binarize(const VoxelGrid& v, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("binarize: threshold must lie in (0, 1)");
  }
  BinaryVolume out(v.dims);
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    out.values[i] = v.values[i] >= threshold ? 1 : 0;
  }
  return out;
}

double iou(const BinaryVolume& a, const BinaryVolume& b) {
  if (a.dims != b.dims || a.values.size() != b.values.size()) {
    throw ShapeError("iou: volume dimensions differ");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const bool x = a.values[i] != 0;
    const bool y = b.values[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

ShapeKind parse_shape_kind(std::string_view name) {
  if (name == "cube") return ShapeKind::cube;
  if (name == "sphere") return ShapeKind::sphere;
  if (name == "cross") return ShapeKind::cross;
  if (name == "chair") return ShapeKind::chair;
  if (name == "hollow_box") return ShapeKind::hollow_box;
  throw InvalidArgument("unknown kind: " + std::string(name));
}

std::string_view shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::cube: return "cube";
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cross: return "cross";
    case ShapeKind::chair: return "chair";
    case ShapeKind::hollow_box: return "hollow_box";
  }
  return "unknown";
}

namespace {

struct Box {
  double x0, x1, y0, y1, z0, z1;
  bool contains(const Vec3& p) const {
    return p.x() >= x0 && p.x() < x1 && p.y() >= y0 && p.y() < y1 &&
           p.z() >= z0 && p.z() < z1;
  }
};

// Chair proportions in world units. The back rises along -y.
constexpr double kSeatHalf = 0.3;
constexpr double kSeatBottom = -0.05;
constexpr double kSeatTop = 0.05;
constexpr double kBackDepth = 0.08;
constexpr double kBackTop = 0.45;
constexpr double kLegWidth = 0.08;
constexpr double kLegBottom = -0.42;

bool in_chair(const Vec3& p) {
  const Box seat{-kSeatHalf, kSeatHalf, -kSeatHalf, kSeatHalf, kSeatBottom, kSeatTop};
  const Box back{-kSeatHalf, kSeatHalf, -kSeatHalf, -kSeatHalf + kBackDepth,
                 kSeatTop, kBackTop};
  if (seat.contains(p) || back.contains(p)) return true;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const double xa = sx < 0 ? -kSeatHalf : kSeatHalf - kLegWidth;
      const double ya = sy < 0 ? -kSeatHalf : kSeatHalf - kLegWidth;
      const Box leg{xa, xa + kLegWidth, ya, ya + kLegWidth, kLegBottom, kSeatBottom};
      if (leg.contains(p)) return true;
    }
  }
  return false;
}

bool in_central(std::size_t i, std::size_t extent, std::size_t thickness) {
  const std::size_t lo = (extent - thickness) / 2;
  return i >= lo && i < lo + thickness;
}

VoxelGrid erode(const VoxelGrid& v, std::size_t radius) {
  const Dims3 d = v.dims;
  VoxelGrid out(d);
  const auto r = static_cast<long>(radius);
  for (std::size_t n = 0; n < d.h; ++n) {
    for (std::size_t m = 0; m < d.w; ++m) {
      for (std::size_t l = 0; l < d.d; ++l) {
        bool keep = v.at(n, m, l) >= 0.5;
        for (long dn = -r; keep && dn <= r; ++dn) {
          for (long dm = -r; keep && dm <= r; ++dm) {
            for (long dl = -r; keep && dl <= r; ++dl) {
              const long nn = static_cast<long>(n) + dn;
              const long mm = static_cast<long>(m) + dm;
              const long ll = static_cast<long>(l) + dl;
              if (nn < 0 || mm < 0 || ll < 0 || nn >= static_cast<long>(d.h) ||
                  mm >= static_cast<long>(d.w) || ll >= static_cast<long>(d.d) ||
                  v.at(static_cast<std::size_t>(nn), static_cast<std::size_t>(mm),
                       static_cast<std::size_t>(ll)) < 0.5) {
                keep = false;
              }
            }
          }
        }
        out.at(n, m, l) = keep ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

}  // namespace

VoxelGrid synth_shape(ShapeKind kind, const Dims3& dims) {
  if (dims.h < 8 || dims.w < 8 || dims.d < 8) {
    throw InvalidArgument("synth_shape: every dimension must be >= 8");
  }
  VoxelGrid g(dims);
  if (kind == ShapeKind::hollow_box) {
    const VoxelGrid solid = synth_shape(ShapeKind::cube, dims);
    const VoxelGrid core = erode(solid, kHollowWall);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      g.values[i] = solid.values[i] - core.values[i];
    }
    return g;
  }
  for (std::size_t n = 0; n < dims.h; ++n) {
    for (std::size_t m = 0; m < dims.w; ++m) {
      for (std::size_t l = 0; l < dims.d; ++l) {
        const Vec3 c = voxel_center(n, m, l, dims);
        bool on = false;
        switch (kind) {
          case ShapeKind::sphere:
            on = c.norm() <= kSphereRadius;
            break;
          case ShapeKind::cube:
            on = std::abs(c.x()) < 0.25 && std::abs(c.y()) < 0.25 &&
                 std::abs(c.z()) < 0.25;
            break;
          case ShapeKind::cross: {
            // Three orthogonal bars through the center, dims/8 voxels thick.
            const bool rn = in_central(n, dims.h, std::max<std::size_t>(1, dims.h / 8));
            const bool rm = in_central(m, dims.w, std::max<std::size_t>(1, dims.w / 8));
            const bool rl = in_central(l, dims.d, std::max<std::size_t>(1, dims.d / 8));
            on = (rn && rl) || (rm && rl) || (rn && rm);
            break;
          }
          case ShapeKind::chair:
            on = in_chair(c);
            break;
          case ShapeKind::hollow_box:
            break;
        }
        g.at(n, m, l) = on ? 1.0 : 0.0;
      }
    }
  }
  return g;
}

VoxelGrid rotate90_z(const VoxelGrid& v, int quarter_turns) {
  if (v.dims.h != v.dims.w) {
    throw ShapeError("rotate90_z: requires H == W");
  }
  int turns = quarter_turns % 4;
  if (turns < 0) turns += 4;
  VoxelGrid cur = v;
  const std::size_t s = v.dims.h;
  for (int t = 0; t < turns; ++t) {
    VoxelGrid next(v.dims);
    for (std::size_t n = 0; n < s; ++n) {
      for (std::size_t m = 0; m < s; ++m) {
        for (std::size_t l = 0; l < v.dims.d; ++l) {
          next.at(n, m, l) = cur.at(m, s - 1 - n, l);
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

BinaryVolume visual_hull(std::span<const Silhouette> silhouettes,
                         std::span<const CameraView> views, const Dims3& dims) {
  if (silhouettes.size() != views.size()) {
    throw ShapeError("visual_hull: silhouette count != view count");
  }
  if (views.empty()) {
    throw InvalidArgument("visual_hull: need at least one view");
  }
  for (std::size_t k = 0; k < views.size(); ++k) {
    if (silhouettes[k].h != views[k].intrinsics.image_h ||
        silhouettes[k].w != views[k].intrinsics.image_w) {
      throw ShapeError("visual_hull: silhouette size differs from image size");
    }
  }
  BinaryVolume hull(dims);
  const auto total = static_cast<long>(dims.count());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::size_t l = idx % dims.d;
    const std::size_t m = (idx / dims.d) % dims.w;
    const std::size_t n = idx / (dims.d * dims.w);
    const Vec3 center = voxel_center(n, m, l, dims);
    bool keep = true;
    for (std::size_t k = 0; keep && k < views.size(); ++k) {
      const CameraView& view = views[k];
      const CameraPoint p = view.transform.world_to_camera(center);
      if (!(p.disparity >= view.range.d_min && p.disparity <= view.range.d_max)) {
        keep = false;
        break;
      }
      const double col = std::floor(p.x + 0.5);
      const double row = std::floor(p.y + 0.5);
      const Silhouette& sil = silhouettes[k];
      if (col < 0.0 || row < 0.0 || col >= static_cast<double>(sil.w) ||
          row >= static_cast<double>(sil.h)) {
        keep = false;
        break;
      }
      keep = sil.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) >= 0.5;
    }
    hull.values[idx] = keep ? 1 : 0;
  }
  return hull;
}

}  // namespace voxproj
