#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pano360 {

/// Per-frame mean optical-flow magnitudes, normalized to [0, 1].
class FlowStats {
 public:
  FlowStats() = default;
  explicit FlowStats(std::vector<float> values);

  const std::vector<float>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  bool operator==(const FlowStats&) const = default;

 private:
  std::vector<float> values_;
};

struct ClipRecord {
  std::string id;
  std::string source;
  int frame_count = 1;
  double fps = 20.0;
  std::optional<std::string> caption;
  FlowStats flow;  ///< empty until flow statistics are attached

  bool operator==(const ClipRecord&) const = default;
};

/// Throws std::invalid_argument when frame_count < 1, fps <= 0 or the flow length disagrees with
/// frame_count.
void validate(const ClipRecord& record);

inline constexpr int kClipOutputFrames = 100;  // 5 s at 20 fps
inline constexpr double kClipOutputFps = 20.0;
inline constexpr int kSpeedupStride = 2;

/// Source frames [start, end) consumed by one clip; every `stride`-th frame is kept.
struct ClipWindow {
  int start = 0;
  int end = 0;
  int stride = kSpeedupStride;

  bool operator==(const ClipWindow&) const = default;
};

/// Non-overlapping windows that each yield a 100-frame, 20 fps clip after 2x frame dropping.
/// A trailing partial window is dropped.
std::vector<ClipWindow> window_clips(int total_frames, double src_fps);

/// The 100 source frame indices of a window: stride-2 decimation, then nearest-frame resampling
/// to 20 fps.
std::vector<int> clip_frame_indices(const ClipWindow& window, double src_fps);

/// True unless fewer than `min_fraction` of frames have flow above `threshold`. Values are
/// compared at single precision. Throws std::invalid_argument on empty stats.
bool static_filter(const FlowStats& stats, double threshold = 0.1, double min_fraction = 0.10);

/// Writes JSON lines sorted by id and returns the number of records. Throws
/// std::invalid_argument naming the first duplicated id.
std::size_t build_manifest(std::vector<ClipRecord> records, const std::filesystem::path& out);
std::vector<ClipRecord> load_manifest(const std::filesystem::path& path);

/// Flow-stats JSON lines {"clip_id": str, "values": [...]}, keyed by clip id.
std::map<std::string, FlowStats> load_flow_stats(const std::filesystem::path& path);

}  // namespace pano360
