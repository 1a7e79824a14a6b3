#include "pano360/datapipe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pano360 {

FlowStats::FlowStats(std::vector<float> values) : values_(std::move(values)) {
  for (float v : values_) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw std::invalid_argument("FlowStats: value " + std::to_string(v) + " outside [0, 1]");
    }
  }
}

void validate(const ClipRecord& record) {
  if (record.frame_count < 1) {
    throw std::invalid_argument("clip " + record.id + ": frame_count must be >= 1");
  }
  if (!(record.fps > 0.0)) {
    throw std::invalid_argument("clip " + record.id + ": fps must be positive");
  }
  if (!record.flow.empty() && record.flow.size() != std::size_t(record.frame_count)) {
    throw std::invalid_argument("clip " + record.id + ": flow has " +
                                std::to_string(record.flow.size()) + " values for " +
                                std::to_string(record.frame_count) + " frames");
  }
}

namespace {

// Raw frames spanned by one clip: 5 s of output at 2x speed is 10 s of source.
int window_length(double src_fps) {
  if (!(src_fps > 0.0)) {
    throw std::invalid_argument("window_clips: source fps must be positive");
  }
  const double seconds = kClipOutputFrames / kClipOutputFps * kSpeedupStride;
  return static_cast<int>(std::ceil(seconds * src_fps - 1e-9));
}

}  // namespace

std::vector<ClipWindow> window_clips(int total_frames, double src_fps) {
  const int len = window_length(src_fps);
  std::vector<ClipWindow> windows;
  for (int start = 0; start + len <= total_frames; start += len) {
    windows.push_back({start, start + len, kSpeedupStride});
  }
  return windows;
}

std::vector<int> clip_frame_indices(const ClipWindow& window, double src_fps) {
  const double decimated_fps = src_fps / window.stride;
  const int kept = (window.end - window.start + window.stride - 1) / window.stride;
  std::vector<int> indices;
  indices.reserve(kClipOutputFrames);
  for (int j = 0; j < kClipOutputFrames; ++j) {
    const int k = std::min(kept - 1, static_cast<int>(std::floor(j * decimated_fps / kClipOutputFps + 0.5)));
    indices.push_back(window.start + k * window.stride);
  }
  return indices;
}

bool static_filter(const FlowStats& stats, double threshold, double min_fraction) {
  if (stats.empty()) {
    throw std::invalid_argument("static_filter: empty flow statistics");
  }
  const auto t = static_cast<float>(threshold);
  const auto moving = std::count_if(stats.values().begin(), stats.values().end(),
                                    [t](float v) { return v > t; });
  // Exactly min_fraction of moving frames counts as dynamic.
  return double(moving) >= min_fraction * double(stats.size()) - 1e-9;
}

namespace {

nlohmann::json to_json(const ClipRecord& r) {
  nlohmann::json j{{"id", r.id},
                   {"source", r.source},
                   {"frame_count", r.frame_count},
                   {"fps", r.fps},
                   {"flow", r.flow.values()}};
  if (r.caption) j["caption"] = *r.caption;
  return j;
}

ClipRecord from_json(const nlohmann::json& j) {
  ClipRecord r;
  r.id = j.at("id").get<std::string>();
  r.source = j.value("source", std::string{});
  r.frame_count = j.at("frame_count").get<int>();
  r.fps = j.at("fps").get<double>();
  if (j.contains("caption") && !j["caption"].is_null()) r.caption = j["caption"].get<std::string>();
  if (j.contains("flow")) r.flow = FlowStats(j["flow"].get<std::vector<float>>());
  validate(r);
  return r;
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::size_t build_manifest(std::vector<ClipRecord> records, const std::filesystem::path& out) {
  std::sort(records.begin(), records.end(),
            [](const ClipRecord& a, const ClipRecord& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    validate(records[i]);
    if (i > 0 && records[i].id == records[i - 1].id) {
      throw std::invalid_argument("build_manifest: duplicate clip id '" + records[i].id + "'");
    }
  }
  std::ofstream file(out);
  if (!file) throw std::runtime_error("cannot write manifest " + out.string());
  for (const auto& r : records) file << to_json(r).dump() << '\n';
  if (!file) throw std::runtime_error("failed writing manifest " + out.string());
  return records.size();
}

std::vector<ClipRecord> load_manifest(const std::filesystem::path& path) {
  std::vector<ClipRecord> records;
  for_each_json_line(path, [&](const nlohmann::json& j) { records.push_back(from_json(j)); });
  return records;
}

std::map<std::string, FlowStats> load_flow_stats(const std::filesystem::path& path) {
  std::map<std::string, FlowStats> stats;
  for_each_json_line(path, [&](const nlohmann::json& j) {
    stats[j.at("clip_id").get<std::string>()] = FlowStats(j.at("values").get<std::vector<float>>());
  });
  return stats;
}

}  // namespace pano360
