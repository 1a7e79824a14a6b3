#include "pano360/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pano360 {

PanoCanvas::PanoCanvas(Image image) : image_(std::move(image)) {
  if (image_.height() < 1 || image_.width() != 2 * image_.height()) {
    throw std::invalid_argument("PanoCanvas: width must be twice the height (got " +
                                std::to_string(image_.width()) + "x" +
                                std::to_string(image_.height()) + ")");
  }
}

PanoCanvas::PanoCanvas(int height, int channels, float fill)
    : PanoCanvas(Image(2 * height, height, channels, fill)) {}

PerspView::PerspView(Image image, CameraPose pose) : image_(std::move(image)), pose_(pose) {
  if (image_.width() != image_.height() || image_.width() < 1) {
    throw std::invalid_argument("PerspView: frame must be square and non-empty");
  }
}

VideoMask::VideoMask(std::vector<Mask> frames, PoseTrajectory trajectory)
    : frames_(std::move(frames)), trajectory_(std::move(trajectory)) {
  if (frames_.size() != trajectory_.size()) {
    throw std::invalid_argument("VideoMask: " + std::to_string(frames_.size()) +
                                " mask frames for a trajectory of " +
                                std::to_string(trajectory_.size()));
  }
}

namespace {

double keys_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// 4x4 Keys interpolation; fetch(ix, iy, c) resolves out-of-range indices.
template <typename Fetch>
void sample_bicubic(double x, double y, int channels, Fetch fetch, std::span<float> out) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  double wx[4], wy[4];
  for (int k = 0; k < 4; ++k) {
    wx[k] = keys_weight(x - (x0 + k - 1));
    wy[k] = keys_weight(y - (y0 + k - 1));
  }
  for (int c = 0; c < channels; ++c) {
    double acc = 0.0;
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) acc += wx[i] * wy[j] * fetch(x0 + i - 1, y0 + j - 1, c);
    out[c] = static_cast<float>(acc);
  }
}

// u wraps around the canvas, v is clamped to the first/last row.
void sample_canvas(const Image& img, double u, double v, Interp interp, std::span<float> out) {
  const int w = img.width();
  const int h = img.height();
  v = std::clamp(v, 0.0, double(h - 1));
  if (interp == Interp::Bicubic) {
    sample_bicubic(u, v, img.channels(), [&](int x, int y, int c) {
      return img.at(((x % w) + w) % w, std::clamp(y, 0, h - 1), c);
    }, out);
    return;
  }
  if (interp == Interp::Nearest) {
    int x = static_cast<int>(std::floor(u + 0.5)) % w;
    if (x < 0) x += w;
    const int y = static_cast<int>(std::floor(v + 0.5));
    auto px = img.pixel(x, std::min(y, h - 1));
    std::copy(px.begin(), px.end(), out.begin());
    return;
  }
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const double au = u - fu;
  const double av = v - fv;
  int x0 = static_cast<int>(fu) % w;
  if (x0 < 0) x0 += w;
  const int x1 = (x0 + 1) % w;
  const int y0 = static_cast<int>(fv);
  const int y1 = std::min(y0 + 1, h - 1);
  for (int c = 0; c < img.channels(); ++c) {
    const double top = (1.0 - au) * img.at(x0, y0, c) + au * img.at(x1, y0, c);
    const double bottom = (1.0 - au) * img.at(x0, y1, c) + au * img.at(x1, y1, c);
    out[c] = static_cast<float>((1.0 - av) * top + av * bottom);
  }
}

// Clamped in both axes.
void sample_view(const Image& img, double x, double y, Interp interp, std::span<float> out) {
  const int s = img.width();
  x = std::clamp(x, 0.0, double(s - 1));
  y = std::clamp(y, 0.0, double(s - 1));
  if (interp == Interp::Bicubic) {
    sample_bicubic(x, y, img.channels(), [&](int i, int j, int c) {
      return img.at(std::clamp(i, 0, s - 1), std::clamp(j, 0, s - 1), c);
    }, out);
    return;
  }
  if (interp == Interp::Nearest) {
    auto px = img.pixel(static_cast<int>(std::floor(x + 0.5)), static_cast<int>(std::floor(y + 0.5)));
    std::copy(px.begin(), px.end(), out.begin());
    return;
  }
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, s - 1);
  const int y1 = std::min(y0 + 1, s - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  for (int c = 0; c < img.channels(); ++c) {
    const double top = (1.0 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c);
    const double bottom = (1.0 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c);
    out[c] = static_cast<float>((1.0 - ay) * top + ay * bottom);
  }
}

}  // namespace

PerspView e2p(const PanoCanvas& canvas, const CameraPose& pose, int side, Interp interp) {
  if (side < 2) {
    throw std::invalid_argument("e2p: view side must be >= 2");
  }
  const PinholeCamera cam(pose, side);
  Image out(side, side, canvas.channels());
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const SphereDir d = SphereDir::from_vector(cam.ray(x, y));
      const PixelCoord p = dir_to_pixel(d, canvas.height(), canvas.width());
      sample_canvas(canvas.image(), p.u, p.v, interp, out.pixel(x, y));
    }
  }
  return PerspView(std::move(out), pose);
}

Mask projection_mask(const CameraPose& pose, int height) {
  if (height < 1) {
    throw std::invalid_argument("projection_mask: height must be >= 1");
  }
  const int width = 2 * height;
  // Containment does not depend on the view resolution.
  const PinholeCamera cam(pose, 1);
  Mask mask(width, height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      if (cam.contains(pixel_to_dir(u, v, height, width).to_vector())) mask.at(u, v) = 1;
    }
  }
  return mask;
}

ProjectionResult p2e(const PerspView& view, int height, Interp interp) {
  if (height < 2) {
    throw std::invalid_argument("p2e: canvas height must be >= 2");
  }
  const int width = 2 * height;
  const PinholeCamera cam(view.pose(), view.side());
  ProjectionResult result{PanoCanvas(height, view.image().channels()), Mask(width, height)};
  Image& canvas = result.canvas.image();
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const Vec3 d = pixel_to_dir(u, v, height, width).to_vector();
      double x = 0.0, y = 0.0;
      if (!cam.contains(d) || !cam.project(d, x, y)) continue;
      sample_view(view.image(), x, y, interp, canvas.pixel(u, v));
      result.mask.at(u, v) = 1;
    }
  }
  return result;
}

VideoProjection build_video_projection(const std::vector<PerspView>& anchor,
                                       const PoseTrajectory& traj, int height, Interp interp) {
  if (anchor.size() != traj.size()) {
    throw std::invalid_argument("build_video_projection: anchor has " +
                                std::to_string(anchor.size()) + " frames but trajectory has " +
                                std::to_string(traj.size()));
  }
  std::vector<PanoCanvas> frames;
  std::vector<Mask> masks;
  frames.reserve(anchor.size());
  masks.reserve(anchor.size());
  for (std::size_t t = 0; t < anchor.size(); ++t) {
    const PerspView posed(anchor[t].image(), traj[t]);
    ProjectionResult r = p2e(posed, height, interp);
    frames.push_back(std::move(r.canvas));
    masks.push_back(std::move(r.mask));
  }
  return {std::move(frames), VideoMask(std::move(masks), traj)};
}

double seam_score(const Image& canvas) {
  const int w = canvas.width();
  const int h = canvas.height();
  const int ch = canvas.channels();
  if (w < 2 || h < 1) {
    throw std::invalid_argument("seam_score: canvas needs at least two columns");
  }
  double seam = 0.0;
  double interior = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int c = 0; c < ch; ++c) {
      seam += std::abs(double(canvas.at(w - 1, y, c)) - canvas.at(0, y, c));
      for (int x = 0; x + 1 < w; ++x) {
        interior += std::abs(double(canvas.at(x + 1, y, c)) - canvas.at(x, y, c));
      }
    }
  }
  seam /= double(h) * ch;
  interior /= double(h) * ch * (w - 1);
  if (interior == 0.0) {
    return seam == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return seam / interior;
}

Mask erode_wrapped(const Mask& mask, int radius) {
  const int w = mask.width();
  const int h = mask.height();
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool keep = mask.at(x, y) != 0;
      for (int dy = -radius; keep && dy <= radius; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) {
          keep = false;
          break;
        }
        for (int dx = -radius; dx <= radius; ++dx) {
          if (!mask.at(((x + dx) % w + w) % w, yy)) {
            keep = false;
            break;
          }
        }
      }
      out.at(x, y) = keep ? 1 : 0;
    }
  }
  return out;
}

double psnr(const Image& a, const Image& b, const Mask& region, double peak) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels() ||
      region.width() != a.width() || region.height() != a.height()) {
    throw std::invalid_argument("psnr: shape mismatch");
  }
  double sse = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!region.at(x, y)) continue;
      for (int c = 0; c < a.channels(); ++c) {
        const double d = double(a.at(x, y, c)) - b.at(x, y, c);
        sse += d * d;
        ++n;
      }
    }
  }
  if (n == 0) throw std::invalid_argument("psnr: empty region");
  const double mse = sse / double(n);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

RoundTripReport round_trip(const PerspView& view, int height, int erode_px, Interp interp) {
  const ProjectionResult projected = p2e(view, height, interp);
  const PerspView back = e2p(projected.canvas, view.pose(), view.side(), interp);
  const Mask interior = erode_wrapped(projected.mask, erode_px);

  const PinholeCamera cam(view.pose(), view.side());
  const int width = 2 * height;
  Mask region(view.side(), view.side());
  std::size_t count = 0;
  for (int y = 0; y < view.side(); ++y) {
    for (int x = 0; x < view.side(); ++x) {
      const PixelCoord p = dir_to_pixel(SphereDir::from_vector(cam.ray(x, y)), height, width);
      const int u = static_cast<int>(std::floor(p.u + 0.5)) % width;
      const int v = std::clamp(static_cast<int>(std::floor(p.v + 0.5)), 0, height - 1);
      if (interior.at(u, v)) {
        region.at(x, y) = 1;
        ++count;
      }
    }
  }
  return {psnr(view.image(), back.image(), region), count};
}

}  // namespace pano360
