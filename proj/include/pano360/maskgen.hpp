#pragma once

#include <vector>

#include "pano360/grid.hpp"
#include "pano360/resample.hpp"
#include "pano360/sphere.hpp"

namespace pano360 {

/// Axis-aligned rectangle in pixel units; covers columns [x, x + width) and rows [y, y + height).
struct InscribedRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  double center_x() const { return x + 0.5 * width; }
  double center_y() const { return y + 0.5 * height; }
  long long area() const { return static_cast<long long>(width) * height; }

  bool operator==(const InscribedRect&) const = default;
};

/// Largest all-ones axis-aligned rectangle, O(H*W) via a per-row histogram stack.
/// Ties go to the wider rectangle, then the smaller top row, then the smaller left column.
/// Throws std::invalid_argument when the mask has no set pixel.
InscribedRect max_inscribed_rect(const Mask& mask);

/// Per-pixel AND over all frames.
Mask intersect_masks(const VideoMask& vmask);

enum class CropMode {
  Fixed,     ///< one rectangle from the intersection of all frame masks
  PerFrame,  ///< each frame cropped to its own rectangle
};

/// Crops an equirectangular video to the anchor's inscribed rectangle.
/// Fixed mode throws std::runtime_error when the frame masks share no pixel.
std::vector<Image> anchor_crop(const std::vector<Image>& video, const VideoMask& vmask,
                               CropMode mode = CropMode::Fixed);

using PosEncoding = std::vector<double>;

/// Entry 2i = sin(value / 10000^(2i/D)), entry 2i+1 = cos(same). Requires value in [0, 1] and
/// even D >= 2.
PosEncoding sinusoidal_embed(double value, int dims);

/// Embeddings of [cx/W, cy/H, w/W, h/H, (pitch + pi/2)/pi] concatenated, 5*dims entries.
PosEncoding mask_pos_encoding(const InscribedRect& rect, int height, int width, double pitch,
                              int dims);

/// Embeddings of the unit direction vector, each component mapped from [-1, 1] to [0, 1];
/// 3*dims entries.
PosEncoding spherical_pe(const SphereDir& dir, int dims);

}  // namespace pano360
