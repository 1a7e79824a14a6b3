#pragma once

#include <array>
#include <filesystem>
#include <numbers>
#include <vector>

namespace pano360 {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi).
double wrap_angle(double radians);

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 normalized(const Vec3& v);

/// Direction on the unit sphere. Yaw is wrapped into [-pi, pi); pitch must lie in [-pi/2, pi/2].
///
/// Cartesian frame: x = cos(pitch)cos(yaw) is forward, y = cos(pitch)sin(yaw), z = sin(pitch) is up.
class SphereDir {
 public:
  SphereDir() = default;
  /// Throws std::invalid_argument for non-finite input or |pitch| > pi/2.
  SphereDir(double yaw, double pitch);

  static SphereDir from_degrees(double yaw_deg, double pitch_deg);
  static SphereDir from_vector(const Vec3& v);

  double yaw() const { return yaw_; }
  double pitch() const { return pitch_; }
  Vec3 to_vector() const;

  bool operator==(const SphereDir&) const = default;

 private:
  double yaw_ = 0.0;
  double pitch_ = 0.0;
};

/// Great-circle angle between two directions, radians.
double angular_distance(const SphereDir& a, const SphereDir& b);

/// Diametrically opposite direction: (yaw + pi, -pitch).
SphereDir antipode(const SphereDir& d);

/// Fractional equirectangular pixel coordinate (pixel centers at integer + 0.5 offsets handled
/// by the conversion, i.e. pixel (u, v) covers [u - 0.5, u + 0.5)).
struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Equirectangular pixel to direction. Requires W == 2H, 0 <= u < W, 0 <= v < H.
SphereDir pixel_to_dir(double u, double v, int height, int width);
/// Direction to equirectangular pixel; u wraps into [0, W).
PixelCoord dir_to_pixel(const SphereDir& d, int height, int width);

/// Square pinhole camera pose with zero roll. Field of view in degrees, strictly inside (0, 180).
class CameraPose {
 public:
  CameraPose() = default;
  CameraPose(double fov_deg, SphereDir dir);
  static CameraPose from_degrees(double fov_deg, double yaw_deg, double pitch_deg);

  double fov_deg() const { return fov_deg_; }
  const SphereDir& dir() const { return dir_; }

  bool operator==(const CameraPose&) const = default;

 private:
  double fov_deg_ = 90.0;
  SphereDir dir_;
};

/// Per-frame camera poses sharing one field of view.
class PoseTrajectory {
 public:
  explicit PoseTrajectory(std::vector<CameraPose> frames);

  std::size_t size() const { return frames_.size(); }
  const CameraPose& operator[](std::size_t t) const { return frames_[t]; }
  const std::vector<CameraPose>& frames() const { return frames_; }
  double fov_deg() const { return frames_.front().fov_deg(); }

  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

 private:
  std::vector<CameraPose> frames_;
};

/// Pinhole camera basis and intrinsics for a square view of `side` pixels.
class PinholeCamera {
 public:
  PinholeCamera(const CameraPose& pose, int side);

  int side() const { return side_; }
  double focal() const { return focal_; }
  double tan_half_fov() const { return tan_half_; }

  /// Unit ray through the fractional view pixel (x, y); pixel centers are at integer coordinates.
  Vec3 ray(double x, double y) const;

  /// True iff the direction lies strictly inside the frustum. Rays behind the camera are outside
  /// and boundary ties within 1e-12 resolve to outside.
  bool contains(const Vec3& d) const;

  /// Projects a direction onto the view plane. Only meaningful when the direction is in front of
  /// the camera; returns false otherwise.
  bool project(const Vec3& d, double& x, double& y) const;

 private:
  int side_;
  double focal_;
  double tan_half_;
  double center_;
  Vec3 forward_;
  Vec3 right_;
  Vec3 up_;
};

/// Default per-view field of view for the 20-view icosahedron set.
inline constexpr double kIcosahedronFovDeg = 80.0;

/// Twenty poses aimed at the face centers of a regular icosahedron with vertices on the poles,
/// ordered by descending pitch then ascending yaw.
std::vector<CameraPose> icosahedron_views(double fov_deg = kIcosahedronFovDeg);

/// Four horizon views (FOV 90, pitch 0) at yaw 0, 90, 180, 270 degrees.
std::vector<CameraPose> eval_views();

/// Pose trajectory JSON: array of {fov_deg, yaw_deg (or theta), pitch_deg}, angles in degrees.
PoseTrajectory load_trajectory(const std::filesystem::path& path);
void save_trajectory(const PoseTrajectory& traj, const std::filesystem::path& path);

}  // namespace pano360
