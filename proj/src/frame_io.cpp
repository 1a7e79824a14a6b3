#include "pano360/frame_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace pano360 {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kRawMagic{'P', '3', '6', 'V'};

void write_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                              char((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t read_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw std::runtime_error("raw video truncated");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

void write_f32(std::ostream& out, float f) { write_u32(out, std::bit_cast<std::uint32_t>(f)); }
float read_f32(std::istream& in) { return std::bit_cast<float>(read_u32(in)); }

bool is_raw(const std::string& spec) { return fs::path(spec).extension() == ".f32"; }

std::vector<Image> read_raw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != kRawMagic) throw std::runtime_error(path.string() + " is not a raw video");
  const auto h = read_u32(in);
  const auto w = read_u32(in);
  const auto c = read_u32(in);
  const auto t = read_u32(in);
  std::vector<Image> frames;
  frames.reserve(t);
  for (std::uint32_t f = 0; f < t; ++f) {
    Image img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
    for (std::uint32_t ch = 0; ch < c; ++ch) {
      for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) img.at(int(x), int(y), int(ch)) = read_f32(in);
      }
    }
    frames.push_back(std::move(img));
  }
  return frames;
}

void write_raw(const std::vector<Image>& frames, const fs::path& path) {
  if (frames.empty()) throw std::invalid_argument("write_frames: no frames");
  const Image& first = frames.front();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kRawMagic.data(), 4);
  write_u32(out, std::uint32_t(first.height()));
  write_u32(out, std::uint32_t(first.width()));
  write_u32(out, std::uint32_t(first.channels()));
  write_u32(out, std::uint32_t(frames.size()));
  for (const auto& img : frames) {
    if (img.width() != first.width() || img.height() != first.height() ||
        img.channels() != first.channels()) {
      throw std::invalid_argument("write_frames: frames differ in shape");
    }
    for (int ch = 0; ch < img.channels(); ++ch) {
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) write_f32(out, img.at(x, y, ch));
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string frame_path(const std::string& pattern, int index) {
  std::array<char, 4096> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), pattern.c_str(), index);
  if (n < 0 || n >= int(buf.size())) throw std::invalid_argument("bad frame pattern " + pattern);
  return std::string(buf.data(), std::size_t(n));
}

Image read_png(const fs::path& path) {
  const cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw std::runtime_error("cannot read image " + path.string());
  cv::Mat mat;
  if (raw.depth() != CV_8U) {
    throw std::runtime_error(path.string() + ": only 8-bit images are supported");
  }
  if (raw.channels() == 3) {
    cv::cvtColor(raw, mat, cv::COLOR_BGR2RGB);
  } else if (raw.channels() == 4) {
    cv::cvtColor(raw, mat, cv::COLOR_BGRA2RGB);
  } else {
    mat = raw;
  }
  Image img(mat.cols, mat.rows, mat.channels());
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      for (int c = 0; c < mat.channels(); ++c) {
        img.at(x, y, c) = row[x * mat.channels() + c] / 255.0f;
      }
    }
  }
  return img;
}

void write_png(const Image& image, const fs::path& path) {
  const int ch = image.channels();
  if (ch != 1 && ch != 3) {
    throw std::invalid_argument("write_png: PNG output needs 1 or 3 channels, got " +
                                std::to_string(ch) + " (use .f32 for latent stacks)");
  }
  cv::Mat mat(image.height(), image.width(), ch == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < ch; ++c) {
        const float v = std::clamp(image.at(x, y, c), 0.0f, 1.0f);
        row[x * ch + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  if (ch == 3) cv::cvtColor(mat, mat, cv::COLOR_RGB2BGR);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat)) throw std::runtime_error("cannot write " + path.string());
}

void write_mask_png(const Mask& mask, const fs::path& path) {
  cv::Mat mat(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) mat.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat)) throw std::runtime_error("cannot write " + path.string());
}

Mask read_mask_png(const fs::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty()) throw std::runtime_error("cannot read mask " + path.string());
  Mask mask(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    for (int x = 0; x < mat.cols; ++x) mask.at(x, y) = mat.at<std::uint8_t>(y, x) >= 128 ? 1 : 0;
  }
  return mask;
}

std::vector<Image> read_frames(const std::string& spec) {
  if (is_raw(spec)) return read_raw(spec);
  std::vector<Image> frames;
  if (spec.find('%') != std::string::npos) {
    for (int i = 0;; ++i) {
      const fs::path p = frame_path(spec, i);
      if (!fs::exists(p)) break;
      frames.push_back(read_png(p));
    }
  } else if (fs::is_directory(spec)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(spec)) {
      if (e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) frames.push_back(read_png(p));
  } else {
    frames.push_back(read_png(spec));
  }
  if (frames.empty()) throw std::runtime_error("no frames found at " + spec);
  return frames;
}

void write_frames(const std::vector<Image>& frames, const std::string& spec) {
  const fs::path p(spec);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  if (is_raw(spec)) {
    write_raw(frames, p);
    return;
  }
  if (spec.find('%') == std::string::npos) {
    if (frames.size() != 1) {
      throw std::invalid_argument("write_frames: " + std::to_string(frames.size()) +
                                  " frames need a %d pattern, got " + spec);
    }
    write_png(frames.front(), p);
    return;
  }
  for (std::size_t i = 0; i < frames.size(); ++i) write_png(frames[i], frame_path(spec, int(i)));
}

}  // namespace pano360
