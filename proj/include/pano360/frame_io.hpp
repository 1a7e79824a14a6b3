#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pano360/grid.hpp"

namespace pano360 {

/// Frame sequences on disk. A path ending in ".f32" is a raw float video:
///   "P36V", u32 height, u32 width, u32 channels, u32 frames (little-endian), then float32
///   samples, planar per frame (frame, channel, row, column).
/// Anything else is an 8-bit PNG sequence: a printf pattern such as "out/%04d.png", a directory
/// of PNG files (sorted by name) or a single PNG file. PNG values map to [0, 1].
std::vector<Image> read_frames(const std::string& spec);
void write_frames(const std::vector<Image>& frames, const std::string& spec);

/// Masks are written as 0/255 grayscale PNGs.
void write_mask_png(const Mask& mask, const std::filesystem::path& path);
Mask read_mask_png(const std::filesystem::path& path);

Image read_png(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

/// Expands a printf-style frame pattern for one index.
std::string frame_path(const std::string& pattern, int index);

}  // namespace pano360
