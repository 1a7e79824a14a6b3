#include "pano360/elevation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace pano360 {

ElevationTrajectory::ElevationTrajectory(double start_deg, double slope_deg, std::size_t frames)
    : start_(start_deg), slope_(slope_deg) {
  if (!std::isfinite(start_deg) || !std::isfinite(slope_deg)) {
    throw std::invalid_argument("ElevationTrajectory: non-finite start or slope");
  }
  if (frames == 0) {
    throw std::invalid_argument("ElevationTrajectory: needs at least one frame");
  }
  samples_.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    samples_.push_back(std::clamp(start_deg + slope_deg * double(t), -90.0, 90.0));
  }
}

PoseTrajectory ElevationTrajectory::to_poses(double fov_deg) const {
  std::vector<CameraPose> poses;
  poses.reserve(samples_.size());
  for (double pitch : samples_) poses.push_back(CameraPose::from_degrees(fov_deg, 0.0, pitch));
  return PoseTrajectory(std::move(poses));
}

double open_unit(std::mt19937_64& rng) {
  // 53 random mantissa bits, offset by half a step so neither endpoint is reachable.
  return (double(rng() >> 11) + 0.5) * 0x1.0p-53;
}

ElevationTrajectory sample_trajectory(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double start = -kMaxStartPitchDeg + 2.0 * kMaxStartPitchDeg * open_unit(rng);
  const double slope = -kMaxSlopeDegPerFrame + 2.0 * kMaxSlopeDegPerFrame * open_unit(rng);
  return {start, slope, frames};
}

ElevationTrajectory fit_line(const EstimateSeries& series) {
  const auto& y = series.pitch_deg;
  const std::size_t n = y.size();
  if (n < 2) {
    throw std::invalid_argument("fit_line: need at least two estimates");
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("fit_line: corrupt estimates (non-finite pitch) in " +
                                  series.source);
    }
  }
  const double mean_t = 0.5 * double(n - 1);
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= double(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = double(t) - mean_t;
    sxy += dt * (y[t] - mean_y);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  return {mean_y - slope * mean_t, slope, n};
}

EstimateSeries load_estimates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open estimate file " + path.string());
  }
  std::map<int, double> by_frame;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      by_frame[obj.at("frame").get<int>()] = obj.at("pitch_deg").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": unparseable estimate line: " + e.what());
    }
  }
  if (by_frame.empty()) {
    throw std::runtime_error("estimate file " + path.string() + " is empty");
  }
  if (by_frame.size() < 2) {
    throw std::runtime_error("estimate file " + path.string() +
                             " needs at least two distinct frames");
  }

  EstimateSeries series;
  series.source = path.string();
  series.first_frame = by_frame.begin()->first;
  auto prev = by_frame.begin();
  series.pitch_deg.push_back(prev->second);
  for (auto it = std::next(prev); it != by_frame.end(); prev = it++) {
    const int gap = it->first - prev->first;
    for (int k = 1; k < gap; ++k) {
      const double a = double(k) / gap;
      series.pitch_deg.push_back((1.0 - a) * prev->second + a * it->second);
    }
    series.pitch_deg.push_back(it->second);
  }
  return series;
}

}  // namespace pano360
