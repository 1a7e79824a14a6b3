#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pano360/sphere.hpp"

namespace pano360 {

/// Linear pitch sequence samples[t] = start + slope * t (degrees), clamped to [-90, 90].
class ElevationTrajectory {
 public:
  ElevationTrajectory(double start_deg, double slope_deg, std::size_t frames);

  double start_deg() const { return start_; }
  double slope_deg() const { return slope_; }
  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  /// Zero-yaw poses following the pitch samples.
  PoseTrajectory to_poses(double fov_deg) const;

 private:
  double start_;
  double slope_;
  std::vector<double> samples_;
};

/// Ranges of the sampled start pitch and per-frame slope (open intervals, degrees).
inline constexpr double kMaxStartPitchDeg = 20.0;
inline constexpr double kMaxSlopeDegPerFrame = 0.5;

/// Uniform double in the open interval (0, 1) from one 64-bit draw.
double open_unit(std::mt19937_64& rng);

/// Draws start in (-20, 20) and slope in (-0.5, 0.5) from mt19937_64 seeded with `seed`.
ElevationTrajectory sample_trajectory(std::size_t frames, std::uint64_t seed);

/// Dense per-frame pitch estimates starting at `first_frame`.
struct EstimateSeries {
  int first_frame = 0;
  std::vector<double> pitch_deg;
  std::string source;
};

/// Ordinary least squares of pitch against frame offset. Throws std::invalid_argument for fewer
/// than two samples or non-finite values. Sampling bounds do not apply to fitted lines.
ElevationTrajectory fit_line(const EstimateSeries& series);

/// Reads JSON lines {"frame": int, "pitch_deg": real}; sorts, keeps the last value for repeated
/// frames and fills missing frames by linear interpolation.
EstimateSeries load_estimates(const std::filesystem::path& path);

}  // namespace pano360
