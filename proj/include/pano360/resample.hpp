#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pano360/grid.hpp"
#include "pano360/sphere.hpp"

namespace pano360 {

/// Equirectangular frame; width is always twice the height.
class PanoCanvas {
 public:
  PanoCanvas() = default;
  explicit PanoCanvas(Image image);
  PanoCanvas(int height, int channels, float fill = 0.0f);

  int height() const { return image_.height(); }
  int width() const { return image_.width(); }
  int channels() const { return image_.channels(); }
  const Image& image() const { return image_; }
  Image& image() { return image_; }

 private:
  Image image_;
};

/// Square perspective frame together with the pose it was taken from.
class PerspView {
 public:
  PerspView(Image image, CameraPose pose);

  int side() const { return image_.width(); }
  const Image& image() const { return image_; }
  Image& image() { return image_; }
  const CameraPose& pose() const { return pose_; }

 private:
  Image image_;
  CameraPose pose_;
};

/// Bicubic uses the Keys kernel with a = -0.5.
enum class Interp { Bilinear, Nearest, Bicubic };

struct ProjectionResult {
  PanoCanvas canvas;
  Mask mask;  ///< 1 where the canvas pixel received a projected value
};

/// Per-frame occupancy of an anchor footprint on the canvas plus the poses that produced it.
class VideoMask {
 public:
  VideoMask(std::vector<Mask> frames, PoseTrajectory trajectory);

  std::size_t size() const { return frames_.size(); }
  const Mask& operator[](std::size_t t) const { return frames_[t]; }
  const std::vector<Mask>& frames() const { return frames_; }
  const PoseTrajectory& trajectory() const { return trajectory_; }

 private:
  std::vector<Mask> frames_;
  PoseTrajectory trajectory_;
};

struct VideoProjection {
  std::vector<PanoCanvas> frames;
  VideoMask mask;
};

/// Samples the canvas into a square view of `side` pixels (circular in u, clamped in v).
PerspView e2p(const PanoCanvas& canvas, const CameraPose& pose, int side,
              Interp interp = Interp::Bilinear);

/// Frustum footprint of `pose` on a canvas of the given height.
Mask projection_mask(const CameraPose& pose, int height);

/// Projects a perspective view onto an empty canvas of the given height.
ProjectionResult p2e(const PerspView& view, int height, Interp interp = Interp::Bilinear);

/// Per-frame p2e over an anchor video. Throws std::invalid_argument on length mismatch.
VideoProjection build_video_projection(const std::vector<PerspView>& anchor,
                                       const PoseTrajectory& traj, int height,
                                       Interp interp = Interp::Bilinear);

/// Wraps `pad` columns from the opposite edge onto each side.
template <typename T>
Grid<T> circular_pad(const Grid<T>& frame, int pad) {
  const int w = frame.width();
  if (pad < 0 || pad > w) {
    throw std::invalid_argument("circular_pad: pad " + std::to_string(pad) +
                                " outside [0, " + std::to_string(w) + "]");
  }
  Grid<T> out(w + 2 * pad, frame.height(), frame.channels());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const int src = ((x - pad) % w + w) % w;
      for (int c = 0; c < frame.channels(); ++c) out.at(x, y, c) = frame.at(src, y, c);
    }
  }
  return out;
}

/// Drops `pad` columns from each side.
template <typename T>
Grid<T> circular_unpad(const Grid<T>& frame, int pad) {
  if (pad < 0 || frame.width() < 2 * pad + 1) {
    throw std::invalid_argument("circular_unpad: width " + std::to_string(frame.width()) +
                                " too small for pad " + std::to_string(pad));
  }
  Grid<T> out(frame.width() - 2 * pad, frame.height(), frame.channels());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < frame.channels(); ++c) out.at(x, y, c) = frame.at(x + pad, y, c);
    }
  }
  return out;
}

/// Ratio of the mean absolute wrap-around column difference to the mean absolute difference of
/// adjacent interior columns. About 1 for seam-continuous content, large for a hard seam.
double seam_score(const Image& canvas);

/// Binary erosion with a (2r+1)^2 square; pixels near the top and bottom edges are eroded and
/// columns wrap around.
Mask erode_wrapped(const Mask& mask, int radius);

/// Peak signal-to-noise ratio over pixels where `region` is set, in dB.
double psnr(const Image& a, const Image& b, const Mask& region, double peak = 1.0);

struct RoundTripReport {
  double psnr_db = 0.0;
  std::size_t pixels = 0;  ///< view pixels inside the eroded footprint
};

/// p2e onto a canvas of `height`, then e2p back at the view's side; compares the two views on
/// view pixels whose canvas pixel lies in the footprint eroded by `erode_px`.
RoundTripReport round_trip(const PerspView& view, int height, int erode_px = 2,
                           Interp interp = Interp::Bilinear);

}  // namespace pano360
