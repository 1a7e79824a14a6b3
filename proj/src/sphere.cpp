#include "pano360/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace pano360 {

double wrap_angle(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  if (radians >= -kPi && radians < kPi) {
    return radians;
  }
  double wrapped = radians - kTwoPi * std::floor((radians + kPi) / kTwoPi);
  // floor() rounding can land exactly on +pi
  if (wrapped >= kPi) wrapped -= kTwoPi;
  if (wrapped < -kPi) wrapped = -kPi;
  return wrapped;
}

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(dot(v, v));
  return {v[0] / n, v[1] / n, v[2] / n};
}

SphereDir::SphereDir(double yaw, double pitch) {
  if (!std::isfinite(pitch) || pitch < -kHalfPi || pitch > kHalfPi) {
    throw std::invalid_argument("SphereDir: pitch " + std::to_string(pitch) +
                                " outside [-pi/2, pi/2]");
  }
  yaw_ = wrap_angle(yaw);
  pitch_ = pitch;
}

SphereDir SphereDir::from_degrees(double yaw_deg, double pitch_deg) {
  return {deg_to_rad(yaw_deg), deg_to_rad(pitch_deg)};
}

SphereDir SphereDir::from_vector(const Vec3& v) {
  const Vec3 n = normalized(v);
  const double pitch = std::asin(std::clamp(n[2], -1.0, 1.0));
  return {std::atan2(n[1], n[0]), pitch};
}

Vec3 SphereDir::to_vector() const {
  const double cp = std::cos(pitch_);
  return {cp * std::cos(yaw_), cp * std::sin(yaw_), std::sin(pitch_)};
}

double angular_distance(const SphereDir& a, const SphereDir& b) {
  const Vec3 va = a.to_vector();
  const Vec3 vb = b.to_vector();
  // atan2 form stays accurate for nearly parallel vectors
  const Vec3 cross{va[1] * vb[2] - va[2] * vb[1], va[2] * vb[0] - va[0] * vb[2],
                   va[0] * vb[1] - va[1] * vb[0]};
  return std::atan2(std::sqrt(dot(cross, cross)), dot(va, vb));
}

SphereDir antipode(const SphereDir& d) {
  const double yaw = d.yaw() >= 0.0 ? d.yaw() - kPi : d.yaw() + kPi;
  return {yaw, -d.pitch()};
}

namespace {

void check_canvas_shape(int height, int width) {
  if (height < 1 || width != 2 * height) {
    throw std::invalid_argument("equirectangular canvas must satisfy W == 2H (got H=" +
                                std::to_string(height) + ", W=" + std::to_string(width) + ")");
  }
}

}  // namespace

SphereDir pixel_to_dir(double u, double v, int height, int width) {
  check_canvas_shape(height, width);
  if (!(u >= 0.0 && u < width) || !(v >= 0.0 && v < height)) {
    throw std::out_of_range("pixel_to_dir: pixel (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") outside canvas");
  }
  const double yaw = (u + 0.5) / width * kTwoPi - kPi;
  // rows past the last pixel center would overshoot the south pole
  const double pitch = std::max(-kHalfPi, kHalfPi - (v + 0.5) / height * kPi);
  return {yaw, pitch};
}

PixelCoord dir_to_pixel(const SphereDir& d, int height, int width) {
  check_canvas_shape(height, width);
  double u = (d.yaw() + kPi) / kTwoPi * width - 0.5;
  if (u < 0.0) u += width;
  if (u >= width) u -= width;
  const double v = (kHalfPi - d.pitch()) / kPi * height - 0.5;
  return {u, v};
}

CameraPose::CameraPose(double fov_deg, SphereDir dir) : fov_deg_(fov_deg), dir_(dir) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw std::invalid_argument("CameraPose: fov " + std::to_string(fov_deg) +
                                " outside (0, 180)");
  }
}

CameraPose CameraPose::from_degrees(double fov_deg, double yaw_deg, double pitch_deg) {
  return {fov_deg, SphereDir::from_degrees(yaw_deg, pitch_deg)};
}

PoseTrajectory::PoseTrajectory(std::vector<CameraPose> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) {
    throw std::invalid_argument("PoseTrajectory: needs at least one frame");
  }
  for (const auto& f : frames_) {
    if (f.fov_deg() != frames_.front().fov_deg()) {
      throw std::invalid_argument("PoseTrajectory: all frames must share one fov");
    }
  }
}

PinholeCamera::PinholeCamera(const CameraPose& pose, int side) : side_(side) {
  if (side < 1) {
    throw std::invalid_argument("PinholeCamera: side must be >= 1");
  }
  tan_half_ = std::tan(deg_to_rad(pose.fov_deg()) * 0.5);
  focal_ = 0.5 * side / tan_half_;
  center_ = 0.5 * (side - 1);
  const double yaw = pose.dir().yaw();
  const double pitch = pose.dir().pitch();
  forward_ = pose.dir().to_vector();
  right_ = {-std::sin(yaw), std::cos(yaw), 0.0};
  up_ = {-std::sin(pitch) * std::cos(yaw), -std::sin(pitch) * std::sin(yaw), std::cos(pitch)};
}

Vec3 PinholeCamera::ray(double x, double y) const {
  const double dx = x - center_;
  const double dy = y - center_;
  Vec3 r;
  for (int i = 0; i < 3; ++i) {
    r[i] = focal_ * forward_[i] + dx * right_[i] - dy * up_[i];
  }
  return normalized(r);
}

bool PinholeCamera::contains(const Vec3& d) const {
  constexpr double kTie = 1e-12;
  const double z = dot(d, forward_);
  if (z <= kTie) return false;
  const double limit = tan_half_ * z - kTie;
  return std::abs(dot(d, right_)) < limit && std::abs(dot(d, up_)) < limit;
}

bool PinholeCamera::project(const Vec3& d, double& x, double& y) const {
  const double z = dot(d, forward_);
  if (z <= 0.0) return false;
  x = center_ + focal_ * dot(d, right_) / z;
  y = center_ - focal_ * dot(d, up_) / z;
  return true;
}

std::vector<CameraPose> icosahedron_views(double fov_deg) {
  // Vertices: both poles plus two staggered rings of five at elevation +-atan(1/2).
  const double ring = std::atan(0.5);
  std::vector<Vec3> vertices;
  vertices.push_back({0.0, 0.0, 1.0});
  for (int i = 0; i < 5; ++i) {
    vertices.push_back(SphereDir(kTwoPi * i / 5.0, ring).to_vector());
  }
  for (int i = 0; i < 5; ++i) {
    vertices.push_back(SphereDir(kTwoPi * (i + 0.5) / 5.0, -ring).to_vector());
  }
  vertices.push_back({0.0, 0.0, -1.0});

  std::vector<std::array<int, 3>> faces;
  for (int i = 0; i < 5; ++i) {
    const int a = 1 + i, b = 1 + (i + 1) % 5;        // upper ring
    const int c = 6 + i, d = 6 + (i + 1) % 5;        // lower ring
    faces.push_back({0, a, b});
    faces.push_back({a, b, c});
    faces.push_back({b, c, d});
    faces.push_back({11, c, d});
  }

  std::vector<SphereDir> centers;
  for (const auto& f : faces) {
    Vec3 sum{0.0, 0.0, 0.0};
    for (int k : f) {
      for (int i = 0; i < 3; ++i) sum[i] += vertices[k][i];
    }
    centers.push_back(SphereDir::from_vector(sum));
  }
  // Round pitch before comparing so faces of one ring sort by yaw.
  auto key = [](const SphereDir& d) { return std::round(d.pitch() * 1e9); };
  std::sort(centers.begin(), centers.end(), [&](const SphereDir& a, const SphereDir& b) {
    if (key(a) != key(b)) return key(a) > key(b);
    return a.yaw() < b.yaw();
  });

  std::vector<CameraPose> poses;
  poses.reserve(centers.size());
  for (const auto& c : centers) poses.emplace_back(fov_deg, c);
  return poses;
}

std::vector<CameraPose> eval_views() {
  std::vector<CameraPose> poses;
  for (double yaw : {0.0, 90.0, 180.0, 270.0}) {
    poses.push_back(CameraPose::from_degrees(90.0, yaw, 0.0));
  }
  return poses;
}

PoseTrajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open pose trajectory " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed pose trajectory " + path.string() + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    throw std::runtime_error("pose trajectory " + path.string() + " must be a non-empty array");
  }
  std::vector<CameraPose> frames;
  for (const auto& item : doc) {
    if (!item.contains("fov_deg") || !item.contains("pitch_deg") ||
        !(item.contains("yaw_deg") || item.contains("theta"))) {
      throw std::runtime_error("pose entry missing fov_deg/yaw_deg/pitch_deg: " + item.dump());
    }
    const double yaw = item.contains("yaw_deg") ? item["yaw_deg"].get<double>()
                                                : item["theta"].get<double>();
    frames.push_back(CameraPose::from_degrees(item["fov_deg"].get<double>(), yaw,
                                              item["pitch_deg"].get<double>()));
  }
  return PoseTrajectory(std::move(frames));
}

void save_trajectory(const PoseTrajectory& traj, const std::filesystem::path& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& pose : traj) {
    doc.push_back({{"fov_deg", pose.fov_deg()},
                   {"yaw_deg", rad_to_deg(pose.dir().yaw())},
                   {"pitch_deg", rad_to_deg(pose.dir().pitch())}});
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write pose trajectory " + path.string());
  }
  out << doc.dump(2) << '\n';
}

}  // namespace pano360
