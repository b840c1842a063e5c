#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "voxproj/frame.hpp"

namespace voxproj {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Camera pose on a sphere around the grid center. Angles in radians.
struct Viewpoint {
  double azimuth = 0.0;    // normalized to [0, 2pi)
  double elevation = 0.0;  // (-pi/2, pi/2)
  double distance = 1.0;   // camera center to target, world units
};

/// Validates and normalizes; throws InvalidArgument on bad input.
Viewpoint make_viewpoint(double azimuth, double elevation, double distance);
Viewpoint viewpoint_from_degrees(double azimuth_deg, double elevation_deg,
                                 double distance);
double azimuth_degrees(const Viewpoint& v);

struct CameraIntrinsics {
  double focal = 1.0;
  std::size_t image_w = 1;
  std::size_t image_h = 1;
  double cx = 0.0;
  double cy = 0.0;

  Mat3 matrix() const;
};

/// Principal point at the image center, (dim - 1) / 2.
CameraIntrinsics build_intrinsics(double focal, std::size_t image_w,
                                  std::size_t image_h);

struct Extrinsics {
  Mat3 rotation;     // world -> camera
  Vec3 translation;  // t = -R C
  Vec3 center;       // camera center C in world frame
};

/// Look-at pose with world-up +z. Camera axes: x right, y down (image rows),
/// z forward. Throws DegeneratePose when forward is parallel to +z.
Extrinsics extrinsics_from_viewpoint(const Viewpoint& v,
                                     const Vec3& target = Vec3::Zero());

/// A point in the camera-frame volume: pixel column, pixel row, disparity.
struct CameraPoint {
  double x = 0.0;
  double y = 0.0;
  double disparity = 1.0;
};

/// Theta = [K 0; 0 1] [R t; 0 1] together with its cached inverse.
class PerspectiveTransform {
 public:
  /// Throws SingularMatrix when |det(theta)| < 1e-12.
  static PerspectiveTransform from_matrix(const Mat4& theta);

  const Mat4& theta() const { return theta_; }
  const Mat4& theta_inv() const { return theta_inv_; }

  /// Inverse mapping p_s ~ Theta^-1 p_t with z = 1 / d, x~ = x z, y~ = y z.
  /// Throws InvalidDisparity for d <= 0.
  Vec3 camera_to_world(const CameraPoint& p) const;

  /// Forward mapping followed by normalization. The returned disparity is
  /// 1 / z~ and is non-positive for points behind the camera.
  CameraPoint world_to_camera(const Vec3& world) const;

 private:
  PerspectiveTransform(const Mat4& theta, const Mat4& theta_inv)
      : theta_(theta), theta_inv_(theta_inv) {}

  Mat4 theta_;
  Mat4 theta_inv_;
};

PerspectiveTransform compose_transform(const CameraIntrinsics& k,
                                       const Mat3& rotation,
                                       const Vec3& translation);

inline Vec3 camera_to_world(const PerspectiveTransform& transform,
                            const CameraPoint& p) {
  return transform.camera_to_world(p);
}

struct DisparityRange {
  double d_min = 0.0;
  double d_max = 0.0;
};

/// (1 / (distance + r), 1 / (distance - r)). Throws CameraInsideVolume when
/// distance <= r.
DisparityRange disparity_range(double distance, double radius);

/// Bounding-sphere radius r is half the diagonal of the world cube, which is
/// independent of voxel resolution.
DisparityRange disparity_range(const Viewpoint& v,
                               double world_extent = kWorldExtent);

/// Dense sample positions of the camera-frame volume U, stored in the voxel
/// index coordinates of the source grid. Indexing is (n', m', l') row-major.
struct SamplingGrid {
  Dims3 out_dims;
  Dims3 volume_dims;
  DisparityRange range;
  std::vector<Vec3> points;

  const Vec3& at(std::size_t n, std::size_t m, std::size_t l) const {
    return points[out_dims.index(n, m, l)];
  }
};

/// Disparity of slice l' in a D'-slice sweep; linear in disparity.
double slice_disparity(const DisparityRange& range, std::size_t slice,
                       std::size_t depth);

SamplingGrid build_sampling_grid(const PerspectiveTransform& transform,
                                 const Dims3& out_dims,
                                 const DisparityRange& range,
                                 const Dims3& volume_dims);

/// Everything needed to render one view.
struct CameraView {
  Viewpoint viewpoint;
  CameraIntrinsics intrinsics;
  PerspectiveTransform transform;
  DisparityRange range;
};

CameraView make_camera_view(const Viewpoint& v, const CameraIntrinsics& k);

/// Sampling grid whose image plane matches the view's intrinsics.
SamplingGrid build_sampling_grid(const CameraView& view, std::size_t depth,
                                 const Dims3& volume_dims);

// Default rig: 24 azimuths at 15 degree steps, elevation 30 degrees.
inline constexpr std::size_t kDefaultViewCount = 24;
inline constexpr double kDefaultElevationDeg = 30.0;
inline constexpr double kDefaultDistance = 2.0;
inline constexpr double kDefaultFocalScale = 0.86;
inline constexpr std::size_t kDefaultDepthSlices = 32;

std::vector<Viewpoint> default_rig();

/// Focal length that maps one world unit at the default distance onto 86% of
/// the image width.
double default_focal(std::size_t image_w, double distance = kDefaultDistance);

/// Rig text format: one `azimuth_deg elevation_deg distance` line per view,
/// `#` starts a comment. Throws IoError naming the offending line.
std::vector<Viewpoint> parse_rig(std::istream& in);
std::vector<Viewpoint> load_rig(const std::string& path);
std::string format_rig(const std::vector<Viewpoint>& rig);

}  // namespace voxproj
