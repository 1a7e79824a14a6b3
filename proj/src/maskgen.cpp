#include "pano360/maskgen.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <tuple>

namespace pano360 {

namespace {

// Lexicographic preference among equal-area rectangles.
bool better(const InscribedRect& a, const InscribedRect& b) {
  if (a.area() != b.area()) return a.area() > b.area();
  return std::tuple(-a.width, a.y, a.x) < std::tuple(-b.width, b.y, b.x);
}

}  // namespace

InscribedRect max_inscribed_rect(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> heights(w + 1, 0);  // sentinel bar of height 0 flushes the stack
  std::vector<int> stack;
  stack.reserve(w + 1);
  InscribedRect best;
  bool found = false;

  for (int row = 0; row < h; ++row) {
    for (int x = 0; x < w; ++x) {
      heights[x] = mask.at(x, row) ? heights[x] + 1 : 0;
    }
    stack.clear();
    for (int x = 0; x <= w; ++x) {
      while (!stack.empty() && heights[stack.back()] >= heights[x]) {
        const int bar = heights[stack.back()];
        stack.pop_back();
        const int left = stack.empty() ? 0 : stack.back() + 1;
        if (bar == 0) continue;
        const InscribedRect cand{left, row - bar + 1, x - left, bar};
        if (!found || better(cand, best)) {
          best = cand;
          found = true;
        }
      }
      stack.push_back(x);
    }
  }
  if (!found) {
    throw std::invalid_argument("max_inscribed_rect: mask has no anchor region");
  }
  return best;
}

Mask intersect_masks(const VideoMask& vmask) {
  Mask out = vmask[0];
  for (std::size_t t = 1; t < vmask.size(); ++t) {
    const auto src = vmask[t].data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = dst[i] && src[i];
  }
  return out;
}

namespace {

Image crop(const Image& frame, const InscribedRect& r) {
  Image out(r.width, r.height, frame.channels());
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      for (int c = 0; c < frame.channels(); ++c) {
        out.at(x, y, c) = frame.at(r.x + x, r.y + y, c);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Image> anchor_crop(const std::vector<Image>& video, const VideoMask& vmask,
                               CropMode mode) {
  if (video.size() != vmask.size()) {
    throw std::invalid_argument("anchor_crop: video has " + std::to_string(video.size()) +
                                " frames, mask has " + std::to_string(vmask.size()));
  }
  for (std::size_t t = 0; t < video.size(); ++t) {
    if (video[t].width() != vmask[t].width() || video[t].height() != vmask[t].height()) {
      throw std::invalid_argument("anchor_crop: frame " + std::to_string(t) +
                                  " size differs from its mask");
    }
  }
  std::vector<Image> out;
  out.reserve(video.size());
  if (mode == CropMode::PerFrame) {
    for (std::size_t t = 0; t < video.size(); ++t) {
      out.push_back(crop(video[t], max_inscribed_rect(vmask[t])));
    }
    return out;
  }
  InscribedRect rect;
  try {
    rect = max_inscribed_rect(intersect_masks(vmask));
  } catch (const std::invalid_argument&) {
    throw std::runtime_error(
        "anchor_crop: frame masks have an empty intersection; the trajectory sweeps too far "
        "for a fixed anchor crop");
  }
  for (const auto& frame : video) out.push_back(crop(frame, rect));
  return out;
}

PosEncoding sinusoidal_embed(double value, int dims) {
  if (dims < 2 || dims % 2 != 0) {
    throw std::invalid_argument("sinusoidal_embed: dims must be even and >= 2");
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("sinusoidal_embed: value " + std::to_string(value) +
                                " outside [0, 1]");
  }
  PosEncoding out(dims);
  for (int i = 0; i < dims / 2; ++i) {
    const double arg = value / std::pow(10000.0, 2.0 * i / dims);
    out[2 * i] = std::sin(arg);
    out[2 * i + 1] = std::cos(arg);
  }
  return out;
}

namespace {

PosEncoding concat_embeddings(std::initializer_list<double> scalars, int dims) {
  PosEncoding out;
  out.reserve(scalars.size() * dims);
  for (double s : scalars) {
    const PosEncoding block = sinusoidal_embed(s, dims);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace

PosEncoding mask_pos_encoding(const InscribedRect& rect, int height, int width, double pitch,
                              int dims) {
  if (rect.width < 1 || rect.height < 1 || rect.x < 0 || rect.y < 0 ||
      rect.x + rect.width > width || rect.y + rect.height > height) {
    throw std::invalid_argument("mask_pos_encoding: rectangle outside the canvas");
  }
  if (!(pitch >= -kHalfPi && pitch <= kHalfPi)) {
    throw std::invalid_argument("mask_pos_encoding: pitch outside [-pi/2, pi/2]");
  }
  return concat_embeddings({rect.center_x() / width, rect.center_y() / height,
                            double(rect.width) / width, double(rect.height) / height,
                            (pitch + kHalfPi) / kPi},
                           dims);
}

PosEncoding spherical_pe(const SphereDir& dir, int dims) {
  const Vec3 v = dir.to_vector();
  auto to_unit = [](double c) { return std::clamp(0.5 * (c + 1.0), 0.0, 1.0); };
  return concat_embeddings({to_unit(v[0]), to_unit(v[1]), to_unit(v[2])}, dims);
}

}  // namespace pano360
