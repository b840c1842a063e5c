#include "voxproj/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "voxproj/errors.hpp"
#include "voxproj/io.hpp"

namespace voxproj {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularDet = 1e-12;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

Viewpoint make_viewpoint(double azimuth, double elevation, double distance) {
  if (!std::isfinite(azimuth) || !std::isfinite(elevation) ||
      !std::isfinite(distance)) {
    throw InvalidArgument("viewpoint: non-finite component");
  }
  if (distance <= 0.0) {
    throw InvalidArgument("viewpoint: distance must be positive");
  }
  if (!(elevation > -std::numbers::pi / 2 && elevation < std::numbers::pi / 2)) {
    throw InvalidArgument("viewpoint: elevation must lie in (-pi/2, pi/2)");
  }
  double a = std::fmod(azimuth, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return {a, elevation, distance};
}

Viewpoint viewpoint_from_degrees(double azimuth_deg, double elevation_deg,
                                 double distance) {
  return make_viewpoint(deg_to_rad(azimuth_deg), deg_to_rad(elevation_deg),
                        distance);
}

double azimuth_degrees(const Viewpoint& v) {
  return v.azimuth * 180.0 / std::numbers::pi;
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << focal, 0.0, cx,
       0.0, focal, cy,
       0.0, 0.0, 1.0;
  return k;
}

CameraIntrinsics build_intrinsics(double focal, std::size_t image_w,
                                  std::size_t image_h) {
  if (!(focal > 0.0) || !std::isfinite(focal)) {
    throw InvalidArgument("intrinsics: focal must be positive");
  }
  if (image_w < 1 || image_h < 1) {
    throw InvalidArgument("intrinsics: image dimensions must be >= 1");
  }
  CameraIntrinsics k;
  k.focal = focal;
  k.image_w = image_w;
  k.image_h = image_h;
  k.cx = (static_cast<double>(image_w) - 1.0) / 2.0;
  k.cy = (static_cast<double>(image_h) - 1.0) / 2.0;
  return k;
}

Extrinsics extrinsics_from_viewpoint(const Viewpoint& v, const Vec3& target) {
  // Direct elevation = +-pi/2 requests can't reach here through
  // make_viewpoint, but a hand-built Viewpoint can.
  const double ce = std::cos(v.elevation);
  const Vec3 offset(ce * std::cos(v.azimuth), ce * std::sin(v.azimuth),
                    std::sin(v.elevation));
  const Vec3 center = target + v.distance * offset;
  const Vec3 forward = (target - center).normalized();
  const Vec3 up(0.0, 0.0, 1.0);
  const Vec3 cross = forward.cross(up);
  if (cross.norm() < 1e-9) {
    throw DegeneratePose("extrinsics: view direction parallel to world up");
  }
  const Vec3 right = cross.normalized();
  const Vec3 cam_up = right.cross(forward);

  Extrinsics e;
  e.rotation.row(0) = right.transpose();
  e.rotation.row(1) = -cam_up.transpose();
  e.rotation.row(2) = forward.transpose();
  e.center = center;
  e.translation = -e.rotation * center;
  return e;
}

PerspectiveTransform PerspectiveTransform::from_matrix(const Mat4& theta) {
  const double det = theta.determinant();
  if (!std::isfinite(det) || std::abs(det) < kSingularDet) {
    throw SingularMatrix("perspective transform is singular");
  }
  return PerspectiveTransform(theta, theta.inverse());
}

Vec3 PerspectiveTransform::camera_to_world(const CameraPoint& p) const {
  if (!(p.disparity > 0.0)) {
    throw InvalidDisparity("camera_to_world: disparity must be positive");
  }
  const double z = 1.0 / p.disparity;
  const Eigen::Vector4d cam(p.x * z, p.y * z, z, 1.0);
  const Eigen::Vector4d world = theta_inv_ * cam;
  return world.head<3>() / world.w();
}

CameraPoint PerspectiveTransform::world_to_camera(const Vec3& world) const {
  const Eigen::Vector4d cam = theta_ * world.homogeneous();
  const Vec3 c = cam.head<3>() / cam.w();
  return {c.x() / c.z(), c.y() / c.z(), 1.0 / c.z()};
}

PerspectiveTransform compose_transform(const CameraIntrinsics& k,
                                       const Mat3& rotation,
                                       const Vec3& translation) {
  Mat4 intr = Mat4::Identity();
  intr.topLeftCorner<3, 3>() = k.matrix();
  Mat4 extr = Mat4::Identity();
  extr.topLeftCorner<3, 3>() = rotation;
  extr.topRightCorner<3, 1>() = translation;
  return PerspectiveTransform::from_matrix(intr * extr);
}

DisparityRange disparity_range(double distance, double radius) {
  if (!(distance > radius)) {
    throw CameraInsideVolume("camera lies inside the volume's bounding sphere");
  }
  return {1.0 / (distance + radius), 1.0 / (distance - radius)};
}

DisparityRange disparity_range(const Viewpoint& v, double world_extent) {
  return disparity_range(v.distance, 0.5 * std::sqrt(3.0) * world_extent);
}

double slice_disparity(const DisparityRange& range, std::size_t slice,
                       std::size_t depth) {
  if (depth == 1) return 0.5 * (range.d_min + range.d_max);
  return range.d_min + (range.d_max - range.d_min) * static_cast<double>(slice) /
                           static_cast<double>(depth - 1);
}

SamplingGrid build_sampling_grid(const PerspectiveTransform& transform,
                                 const Dims3& out_dims,
                                 const DisparityRange& range,
                                 const Dims3& volume_dims) {
  if (out_dims.count() == 0 || volume_dims.count() == 0) {
    throw InvalidArgument("sampling grid: dimensions must be >= 1");
  }
  if (!(range.d_min > 0.0) || range.d_min > range.d_max) {
    throw InvalidDisparity("sampling grid: need 0 < d_min <= d_max");
  }
  SamplingGrid grid;
  grid.out_dims = out_dims;
  grid.volume_dims = volume_dims;
  grid.range = range;
  grid.points.resize(out_dims.count());
  for (std::size_t n = 0; n < out_dims.h; ++n) {
    for (std::size_t m = 0; m < out_dims.w; ++m) {
      for (std::size_t l = 0; l < out_dims.d; ++l) {
        const CameraPoint p{static_cast<double>(m), static_cast<double>(n),
                            slice_disparity(range, l, out_dims.d)};
        grid.points[out_dims.index(n, m, l)] =
            world_to_index(transform.camera_to_world(p), volume_dims);
      }
    }
  }
  return grid;
}

CameraView make_camera_view(const Viewpoint& v, const CameraIntrinsics& k) {
  const Extrinsics e = extrinsics_from_viewpoint(v);
  return {v, k, compose_transform(k, e.rotation, e.translation),
          disparity_range(v)};
}

SamplingGrid build_sampling_grid(const CameraView& view, std::size_t depth,
                                 const Dims3& volume_dims) {
  const Dims3 out{view.intrinsics.image_h, view.intrinsics.image_w, depth};
  return build_sampling_grid(view.transform, out, view.range, volume_dims);
}

std::vector<Viewpoint> default_rig() {
  std::vector<Viewpoint> rig;
  rig.reserve(kDefaultViewCount);
  for (std::size_t i = 0; i < kDefaultViewCount; ++i) {
    rig.push_back(viewpoint_from_degrees(15.0 * static_cast<double>(i),
                                         kDefaultElevationDeg, kDefaultDistance));
  }
  return rig;
}

double default_focal(std::size_t image_w, double distance) {
  return kDefaultFocalScale * static_cast<double>(image_w) * distance /
         kWorldExtent;
}

std::vector<Viewpoint> parse_rig(std::istream& in) {
  std::vector<Viewpoint> rig;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const auto fail = [&](const std::string& why) {
      return IoError("rig line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 3) {
      throw fail("expected `azimuth_deg elevation_deg distance`");
    }
    double vals[3];
    for (int i = 0; i < 3; ++i) {
      const auto parsed = parse_double(fields[static_cast<std::size_t>(i)]);
      if (!parsed) throw fail("not a number: '" + std::string(fields[static_cast<std::size_t>(i)]) + "'");
      vals[i] = *parsed;
    }
    try {
      rig.push_back(viewpoint_from_degrees(vals[0], vals[1], vals[2]));
    } catch (const InvalidArgument& e) {
      throw fail(e.what());
    }
  }
  if (rig.empty()) throw IoError("rig: no views");
  return rig;
}

std::vector<Viewpoint> load_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rig file: " + path);
  return parse_rig(in);
}

std::string format_rig(const std::vector<Viewpoint>& rig) {
  std::string out;
  for (const auto& v : rig) {
    out += format_double(azimuth_degrees(v)) + ' ' +
           format_double(v.elevation * 180.0 / std::numbers::pi) + ' ' +
           format_double(v.distance) + '\n';
  }
  return out;
}

}  // namespace voxproj
