#include "pano360/cross_mask.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include <json.hpp>

namespace pano360 {

bool triple_less(const CrossTriple& a, const CrossTriple& b) {
  return std::tuple(a.view, a.pano_idx, a.view_idx, a.tag) <
         std::tuple(b.view, b.pano_idx, b.view_idx, b.tag);
}

std::size_t CrossDomainMask::count(LinkTag tag) const {
  return static_cast<std::size_t>(
      std::count_if(triples.begin(), triples.end(), [&](const auto& t) { return t.tag == tag; }));
}

std::vector<std::pair<std::uint32_t, float>> gaussian_splat(int peak_x, int peak_y, int grid_width,
                                                            int grid_height, double sigma,
                                                            double peak_weight,
                                                            double drop_threshold) {
  std::vector<std::pair<std::uint32_t, float>> out;
  if (sigma <= 0.0) {
    if (peak_weight >= drop_threshold) {
      out.emplace_back(std::uint32_t(peak_y * grid_width + peak_x), float(peak_weight));
    }
    return out;
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int y = std::max(0, peak_y - radius); y <= std::min(grid_height - 1, peak_y + radius); ++y) {
    for (int x = std::max(0, peak_x - radius); x <= std::min(grid_width - 1, peak_x + radius);
         ++x) {
      const double d2 = double(x - peak_x) * (x - peak_x) + double(y - peak_y) * (y - peak_y);
      const double w = peak_weight * std::exp(-d2 * inv);
      if (w >= drop_threshold) out.emplace_back(std::uint32_t(y * grid_width + x), float(w));
    }
  }
  return out;
}

CrossDomainMask build_cross_domain_mask(int height, const std::vector<CameraPose>& views,
                                        const CrossMaskParams& params, int view_side) {
  if (height < 4) {
    throw std::invalid_argument("build_cross_domain_mask: canvas height must be >= 4");
  }
  if (!(params.sigma >= 0.0)) {
    throw std::invalid_argument("build_cross_domain_mask: sigma must be >= 0");
  }
  if (!(params.antipodal_weight > 0.0 && params.antipodal_weight <= 1.0)) {
    throw std::invalid_argument("build_cross_domain_mask: antipodal weight must be in (0, 1]");
  }
  if (views.empty()) {
    throw std::invalid_argument("build_cross_domain_mask: no views");
  }
  const int width = 2 * height;
  const int side = view_side > 0 ? view_side : height / 2;

  CrossDomainMask mask;
  mask.pano_height = height;
  mask.pano_width = width;
  mask.view_width = side;
  mask.view_height = side;
  mask.views = views;
  mask.params = params;

  std::vector<PinholeCamera> cams;
  cams.reserve(views.size());
  for (const auto& pose : views) cams.emplace_back(pose, side);

  auto link = [&](std::uint32_t view, std::uint32_t pano_idx, const Vec3& dir, LinkTag tag,
                  double peak) {
    const PinholeCamera& cam = cams[view];
    double x = 0.0, y = 0.0;
    if (!cam.contains(dir) || !cam.project(dir, x, y)) return;
    const int px = std::clamp(static_cast<int>(std::lround(x)), 0, side - 1);
    const int py = std::clamp(static_cast<int>(std::lround(y)), 0, side - 1);
    for (const auto& [idx, w] :
         gaussian_splat(px, py, side, side, params.sigma, peak, params.drop_threshold)) {
      mask.triples.push_back({view, pano_idx, idx, tag, w});
    }
  };

  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const SphereDir d = pixel_to_dir(u, v, height, width);
      const Vec3 direct = d.to_vector();
      const Vec3 opposite = antipode(d).to_vector();
      const auto pano_idx = std::uint32_t(v * width + u);
      for (std::uint32_t k = 0; k < cams.size(); ++k) {
        link(k, pano_idx, direct, LinkTag::Direct, 1.0);
        if (params.include_antipodal) {
          link(k, pano_idx, opposite, LinkTag::Antipodal, params.antipodal_weight);
        }
      }
    }
  }
  std::sort(mask.triples.begin(), mask.triples.end(), triple_less);
  return mask;
}

std::vector<std::vector<CrossTriple>> view_to_pano(const CrossDomainMask& mask,
                                                   std::uint32_t view) {
  std::vector<std::vector<CrossTriple>> rows(mask.view_pixels());
  // Triples are sorted by pano_idx within a view, so each row stays sorted.
  const auto first = std::lower_bound(
      mask.triples.begin(), mask.triples.end(), view,
      [](const CrossTriple& t, std::uint32_t v) { return t.view < v; });
  for (auto it = first; it != mask.triples.end() && it->view == view; ++it) {
    rows.at(it->view_idx).push_back(*it);
  }
  return rows;
}

Grid<float> attention_bias(const CrossDomainMask& mask, std::uint32_t view, double lambda_direct,
                           double lambda_antipodal) {
  if (!std::isfinite(lambda_direct) || !std::isfinite(lambda_antipodal)) {
    throw std::invalid_argument("attention_bias: lambda values must be finite");
  }
  if (!mask.views.empty() && view >= mask.views.size()) {
    throw std::out_of_range("attention_bias: view " + std::to_string(view) + " out of range");
  }
  Grid<float> bias(static_cast<int>(mask.view_pixels()), static_cast<int>(mask.pano_pixels()));
  for (const auto& t : mask.triples) {
    if (t.view != view) continue;
    const double lambda = t.tag == LinkTag::Direct ? lambda_direct : lambda_antipodal;
    bias.at(int(t.view_idx), int(t.pano_idx)) += static_cast<float>(lambda * t.weight);
  }
  return bias;
}

std::vector<BiasEntry> sparse_attention_bias(const CrossDomainMask& mask, double lambda_direct,
                                             double lambda_antipodal) {
  if (!std::isfinite(lambda_direct) || !std::isfinite(lambda_antipodal)) {
    throw std::invalid_argument("sparse_attention_bias: lambda values must be finite");
  }
  std::vector<BiasEntry> out;
  for (const auto& t : mask.triples) {
    const double lambda = t.tag == LinkTag::Direct ? lambda_direct : lambda_antipodal;
    const auto b = static_cast<float>(lambda * t.weight);
    // Direct and antipodal links of one location are adjacent in sort order.
    if (!out.empty() && out.back().view == t.view && out.back().pano_idx == t.pano_idx &&
        out.back().view_idx == t.view_idx) {
      out.back().bias += b;
    } else {
      out.push_back({t.view, t.pano_idx, t.view_idx, b});
    }
  }
  std::erase_if(out, [](const BiasEntry& e) { return e.bias == 0.0f; });
  return out;
}

ConsistencyReport check_consistency(const CrossDomainMask& mask) {
  ConsistencyReport report;
  const int side = mask.view_width;
  std::vector<PinholeCamera> cams;
  for (const auto& pose : mask.views) cams.emplace_back(pose, side);

  // Peak of each (view, pano_idx, tag) group; groups are contiguous per (view, pano_idx).
  std::size_t i = 0;
  while (i < mask.triples.size()) {
    std::size_t j = i;
    std::array<const CrossTriple*, 2> peak{nullptr, nullptr};
    while (j < mask.triples.size() && mask.triples[j].view == mask.triples[i].view &&
           mask.triples[j].pano_idx == mask.triples[i].pano_idx) {
      const CrossTriple& t = mask.triples[j];
      if (!(t.weight > 0.0f && t.weight <= 1.0f)) report.weights_in_range = false;
      auto& slot = peak[static_cast<int>(t.tag)];
      if (slot == nullptr || t.weight > slot->weight) slot = &t;
      ++j;
    }
    for (int tag = 0; tag < 2; ++tag) {
      const CrossTriple* t = peak[tag];
      if (t == nullptr) continue;
      const int u = static_cast<int>(t->pano_idx % mask.pano_width);
      const int v = static_cast<int>(t->pano_idx / mask.pano_width);
      SphereDir d = pixel_to_dir(u, v, mask.pano_height, mask.pano_width);
      if (t->tag == LinkTag::Antipodal) d = antipode(d);
      double x = 0.0, y = 0.0;
      double err = std::numeric_limits<double>::infinity();
      if (cams.at(t->view).project(d.to_vector(), x, y)) {
        const double vx = t->view_idx % side;
        const double vy = t->view_idx / side;
        err = std::hypot(x - vx, y - vy);
      }
      double& worst = t->tag == LinkTag::Direct ? report.max_direct_error_px
                                                : report.max_antipodal_error_px;
      worst = std::max(worst, err);
      ++report.peaks_checked;
    }
    i = j;
  }

  std::vector<CrossTriple> rebuilt;
  rebuilt.reserve(mask.triples.size());
  for (std::uint32_t k = 0; k < mask.views.size(); ++k) {
    for (const auto& row : view_to_pano(mask, k)) rebuilt.insert(rebuilt.end(), row.begin(), row.end());
  }
  std::sort(rebuilt.begin(), rebuilt.end(), triple_less);
  report.transpose_symmetric = rebuilt == mask.triples;
  return report;
}

namespace {

constexpr std::array<char, 4> kMagic{'X', 'D', 'M', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> raw{};
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> raw{};
  if (!in.read(reinterpret_cast<char*>(raw.data()), raw.size())) {
    throw std::runtime_error("cross mask file truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  T value;
  std::memcpy(&value, raw.data(), sizeof(T));
  return value;
}

nlohmann::json pose_json(const CameraPose& p) {
  return {{"fov_deg", p.fov_deg()},
          {"yaw_deg", rad_to_deg(p.dir().yaw())},
          {"pitch_deg", rad_to_deg(p.dir().pitch())}};
}

}  // namespace

void save_cross_mask(const CrossDomainMask& mask, const std::filesystem::path& binary_path,
                     const std::filesystem::path& sidecar_path, double lambda_direct,
                     double lambda_antipodal) {
  std::ofstream out(binary_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + binary_path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le(out, kVersion);
  put_le(out, std::uint32_t(mask.frames));
  put_le(out, std::uint64_t(mask.triples.size()) * std::uint64_t(mask.frames));
  for (std::uint32_t f = 0; f < std::uint32_t(mask.frames); ++f) {
    for (const auto& t : mask.triples) {
      put_le(out, f);
      put_le(out, t.view);
      put_le(out, t.pano_idx);
      put_le(out, t.view_idx);
      put_le(out, static_cast<std::uint8_t>(t.tag));
      put_le(out, t.weight);
    }
  }
  if (!out) throw std::runtime_error("failed writing " + binary_path.string());

  nlohmann::json side{{"version", kVersion},
                      {"H", mask.pano_height},
                      {"W", mask.pano_width},
                      {"view_width", mask.view_width},
                      {"view_height", mask.view_height},
                      {"frames", mask.frames},
                      {"sigma", mask.params.sigma},
                      {"include_antipodal", mask.params.include_antipodal},
                      {"antipodal_weight", mask.params.antipodal_weight},
                      {"drop_threshold", mask.params.drop_threshold},
                      {"lambda_direct", lambda_direct},
                      {"lambda_antipodal", lambda_antipodal},
                      {"direct_count", mask.count(LinkTag::Direct)},
                      {"antipodal_count", mask.count(LinkTag::Antipodal)}};
  side["views"] = nlohmann::json::array();
  for (const auto& p : mask.views) side["views"].push_back(pose_json(p));
  std::ofstream js(sidecar_path);
  if (!js) throw std::runtime_error("cannot write " + sidecar_path.string());
  js << side.dump(2) << '\n';
}

CrossDomainMask load_cross_mask(const std::filesystem::path& binary_path,
                                const std::filesystem::path& sidecar_path) {
  std::ifstream js(sidecar_path);
  if (!js) throw std::runtime_error("cannot open " + sidecar_path.string());
  const nlohmann::json side = nlohmann::json::parse(js);

  CrossDomainMask mask;
  mask.pano_height = side.at("H").get<int>();
  mask.pano_width = side.at("W").get<int>();
  mask.view_width = side.at("view_width").get<int>();
  mask.view_height = side.at("view_height").get<int>();
  mask.frames = side.at("frames").get<int>();
  mask.params.sigma = side.at("sigma").get<double>();
  mask.params.include_antipodal = side.at("include_antipodal").get<bool>();
  mask.params.antipodal_weight = side.at("antipodal_weight").get<double>();
  mask.params.drop_threshold = side.at("drop_threshold").get<double>();
  for (const auto& p : side.at("views")) {
    mask.views.push_back(CameraPose::from_degrees(p.at("fov_deg").get<double>(),
                                                  p.at("yaw_deg").get<double>(),
                                                  p.at("pitch_deg").get<double>()));
  }

  std::ifstream in(binary_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + binary_path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw std::runtime_error(binary_path.string() + " is not a cross-domain mask file");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw std::runtime_error("unsupported cross mask version " + std::to_string(version));
  }
  const auto frames = get_le<std::uint32_t>(in);
  const auto records = get_le<std::uint64_t>(in);
  if (frames != std::uint32_t(mask.frames) || (frames > 0 && records % frames != 0)) {
    throw std::runtime_error("cross mask header disagrees with sidecar");
  }
  const std::uint64_t per_frame = frames > 0 ? records / frames : 0;
  mask.triples.reserve(per_frame);
  for (std::uint64_t r = 0; r < records; ++r) {
    const auto frame = get_le<std::uint32_t>(in);
    CrossTriple t;
    t.view = get_le<std::uint32_t>(in);
    t.pano_idx = get_le<std::uint32_t>(in);
    t.view_idx = get_le<std::uint32_t>(in);
    t.tag = static_cast<LinkTag>(get_le<std::uint8_t>(in));
    t.weight = get_le<float>(in);
    if (frame == 0) {
      mask.triples.push_back(t);
    } else if (mask.triples.at(r % per_frame) != t) {
      throw std::runtime_error("cross mask frame " + std::to_string(frame) +
                               " differs from frame 0");
    }
  }
  return mask;
}

}  // namespace pano360
