#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pano360/grid.hpp"
#include "pano360/sphere.hpp"

namespace pano360 {

enum class LinkTag : std::uint8_t { Direct = 0, Antipodal = 1 };

/// One activation between a panorama pixel and a pixel of one perspective view.
struct CrossTriple {
  std::uint32_t view = 0;
  std::uint32_t pano_idx = 0;  ///< v * W + u
  std::uint32_t view_idx = 0;  ///< y * view_width + x
  LinkTag tag = LinkTag::Direct;
  float weight = 0.0f;  ///< in (0, 1]

  bool operator==(const CrossTriple&) const = default;
};

/// Sort order of stored triples.
bool triple_less(const CrossTriple& a, const CrossTriple& b);

struct CrossMaskParams {
  double sigma = 1.0;              ///< Gaussian blur, view pixels
  bool include_antipodal = true;
  double antipodal_weight = 1.0;   ///< peak weight of antipodal links
  double drop_threshold = 1e-3;    ///< blurred weights below this are discarded
};

/// Sparse panorama<->view activation map, identical for every frame of a clip.
struct CrossDomainMask {
  int pano_height = 0;
  int pano_width = 0;
  int view_width = 0;
  int view_height = 0;
  int frames = 1;
  std::vector<CameraPose> views;
  CrossMaskParams params;
  std::vector<CrossTriple> triples;  ///< sorted by triple_less

  std::size_t count(LinkTag tag) const;
  std::size_t pano_pixels() const { return std::size_t(pano_height) * pano_width; }
  std::size_t view_pixels() const { return std::size_t(view_width) * view_height; }
};

/// Gaussian footprint of a peak on a view grid: (view_idx, weight) with weight
/// peak * exp(-d^2 / 2 sigma^2), truncated to radius ceil(3 sigma) and to weights >= drop.
std::vector<std::pair<std::uint32_t, float>> gaussian_splat(int peak_x, int peak_y, int grid_width,
                                                            int grid_height, double sigma,
                                                            double peak_weight,
                                                            double drop_threshold);

/// Links every canvas pixel to its image in each view that contains it and, optionally, to the
/// image of its antipode. View side is H/2 unless given.
CrossDomainMask build_cross_domain_mask(int height, const std::vector<CameraPose>& views,
                                        const CrossMaskParams& params, int view_side = 0);

/// Reverse (view -> panorama) adjacency of one view: entry view_idx lists the triples landing on
/// that view pixel, ordered by pano_idx then tag.
std::vector<std::vector<CrossTriple>> view_to_pano(const CrossDomainMask& mask, std::uint32_t view);

/// Dense additive attention bias for one view, rows = panorama pixels, columns = view pixels.
/// Transpose for view queries.
Grid<float> attention_bias(const CrossDomainMask& mask, std::uint32_t view, double lambda_direct,
                           double lambda_antipodal);

struct BiasEntry {
  std::uint32_t view = 0;
  std::uint32_t pano_idx = 0;
  std::uint32_t view_idx = 0;
  float bias = 0.0f;
};

/// Sparse form of attention_bias over all views; entries sharing a location are summed and
/// zero entries are omitted.
std::vector<BiasEntry> sparse_attention_bias(const CrossDomainMask& mask, double lambda_direct,
                                             double lambda_antipodal);

struct ConsistencyReport {
  double max_direct_error_px = 0.0;     ///< peak view pixel vs. re-projected canvas direction
  double max_antipodal_error_px = 0.0;  ///< peak view pixel vs. re-projected antipode
  bool weights_in_range = true;
  bool transpose_symmetric = true;
  std::size_t peaks_checked = 0;

  bool ok() const {
    return max_direct_error_px <= 1.0 && max_antipodal_error_px <= 1.0 && weights_in_range &&
           transpose_symmetric;
  }
};

/// Re-projects the peak of every (pano pixel, view, tag) group and checks the reverse adjacency
/// reproduces the triple set.
ConsistencyReport check_consistency(const CrossDomainMask& mask);

/// Binary layout (little-endian): "XDMK", u32 version, u32 frames, u64 record count, then per
/// record u32 frame, u32 view, u32 pano_idx, u32 view_idx, u8 tag, f32 weight. Records are
/// replicated per frame and sorted by (frame, view, pano_idx, view_idx, tag).
/// The JSON sidecar carries geometry, blur and bias defaults, and the view poses.
void save_cross_mask(const CrossDomainMask& mask, const std::filesystem::path& binary_path,
                     const std::filesystem::path& sidecar_path, double lambda_direct,
                     double lambda_antipodal);
CrossDomainMask load_cross_mask(const std::filesystem::path& binary_path,
                                const std::filesystem::path& sidecar_path);

}  // namespace pano360
