// Acceptance suite: one PASS/FAIL line per criterion with runtime and tolerance.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "oracles.hpp"
#include "pano360/cross_mask.hpp"
#include "pano360/datapipe.hpp"
#include "pano360/elevation.hpp"
#include "pano360/frame_io.hpp"
#include "pano360/maskgen.hpp"
#include "pano360/resample.hpp"
#include "pano360/sphere.hpp"

using namespace pano360;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome antipode_involution() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SphereDir d = SphereDir::from_vector(oracle::random_unit(rng));
    const SphereDir b = antipode(antipode(d));
    worst = std::max({worst, std::abs(std::remainder(b.yaw() - d.yaw(), kTwoPi)), std::abs(b.pitch() - d.pitch())});
  }
  return {worst <= 1e-12, fmt("max error %.3g rad (tol 1e-12)", worst)};
}

Outcome round_trip_psnr() {
  const Image img = read_png(fs::path(PANO360_TEST_DATA) / "astronaut_256.png");
  const PerspView view(img, CameraPose::from_degrees(90, 0, 0));
  const RoundTripReport r = round_trip(view, 512, 2, Interp::Bilinear);
  const RoundTripReport cubic = round_trip(view, 512, 2, Interp::Bicubic);
  return {r.psnr_db >= 35.0, fmt("bilinear PSNR %.2f dB over %.0f px (tol >= 35 dB); bicubic %.2f dB", r.psnr_db,
                                 double(r.pixels), cubic.psnr_db)};
}

Outcome mask_area() {
  const int h = 512, w = 1024;
  const Mask m = projection_mask(CameraPose::from_degrees(90, 0, 0), h);
  double inside = 0.0, total = 0.0;
  for (int v = 0; v < h; ++v) {
    const double c = std::cos(kHalfPi - (v + 0.5) * kPi / h);
    for (int u = 0; u < w; ++u) {
      total += c;
      if (m.at(u, v)) inside += c;
    }
  }
  const double frac = inside / total;
  return {std::abs(frac - 1.0 / 6.0) <= 0.01, fmt("fraction %.5f vs %.5f (tol 0.01)", frac, 1.0 / 6.0)};
}

Outcome icosahedron() {
  const auto views = icosahedron_views();
  double min_angle = kPi;
  for (std::size_t i = 0; i < views.size(); ++i)
    for (std::size_t j = i + 1; j < views.size(); ++j)
      min_angle = std::min(min_angle, angular_distance(views[i].dir(), views[j].dir()));
  const double expect = rad_to_deg(std::acos(std::sqrt(5.0) / 3.0));
  std::mt19937_64 rng(104);
  int covered = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = oracle::random_unit(rng);
    for (const auto& v : views)
      if (oracle::in_frustum(v, d)) {
        ++covered;
        break;
      }
  }
  const bool ok = views.size() == 20 && std::abs(rad_to_deg(min_angle) - expect) <= 0.01 && covered == n;
  std::ostringstream s;
  s << views.size() << " views, min angle " << fmt("%.4f deg vs %.4f (tol 0.01 deg)", rad_to_deg(min_angle), expect)
    << ", coverage " << covered << "/" << n;
  return {ok, s.str()};
}

Outcome inscribed_rect() {
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<int> hd(1, 24), wd(1, 48);
  std::uniform_real_distribution<double> density(0.3, 0.95), u(0, 1);
  int agree = 0, checked = 0;
  while (checked < 200) {
    Mask m(wd(rng), hd(rng));
    const double p = density(rng);
    bool any = false;
    for (auto& v : m.data()) {
      v = u(rng) < p;
      any = any || v;
    }
    if (!any) continue;
    const InscribedRect r = max_inscribed_rect(m);
    if (oracle::rect_all_ones(m, r.x, r.y, r.width, r.height) && r.area() == oracle::brute_force_max_rect_area(m)) ++agree;
    ++checked;
  }
  return {agree == checked, std::to_string(agree) + "/" + std::to_string(checked) + " masks exact"};
}

Outcome circular_padding() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> d(-1, 1);
  bool identity = true;
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 32, h = 4, r = 1 + trial % 5, pad = r + trial % 3;
    Grid<double> f(w, h, 2);
    for (auto& v : f.data()) v = d(rng);
    identity = identity && circular_unpad(circular_pad(f, pad), pad) == f;
    std::vector<double> kernel(2 * r + 1);
    for (auto& k : kernel) k = d(rng);
    const Grid<double> padded = circular_pad(f, pad);
    Grid<double> conv(padded.width(), h, 2);
    for (int y = 0; y < h; ++y)
      for (int x = r; x < padded.width() - r; ++x)
        for (int c = 0; c < 2; ++c) {
          double acc = 0;
          for (int k = -r; k <= r; ++k) acc += kernel[k + r] * padded.at(x + k, y, c);
          conv.at(x, y, c) = acc;
        }
    const Grid<double> got = circular_unpad(conv, pad);
    const int shift = 3 * trial + 1;
    const Grid<double> ref =
        oracle::rotate_columns(oracle::circular_row_conv(oracle::rotate_columns(f, shift), kernel), -shift);
    for (std::size_t i = 0; i < got.data().size(); ++i) worst = std::max(worst, std::abs(got.data()[i] - ref.data()[i]));
  }
  return {identity && worst <= 1e-12,
          std::string(identity ? "pad/unpad bitwise identity" : "pad/unpad MISMATCH") +
              fmt(", conv max error %.3g (tol 1e-12)", worst)};
}

Outcome cross_mask_consistency() {
  const CrossDomainMask m = build_cross_domain_mask(32, icosahedron_views(), CrossMaskParams{});
  const int side = m.view_width;
  double worst[2] = {0.0, 0.0};
  bool framed = true;
  for (const auto& t : m.triples) {
    if (t.weight != float(t.tag == LinkTag::Direct ? 1.0 : m.params.antipodal_weight)) continue;
    SphereDir d = pixel_to_dir(t.pano_idx % m.pano_width, t.pano_idx / m.pano_width, m.pano_height, m.pano_width);
    if (t.tag == LinkTag::Antipodal) d = antipode(d);
    framed = framed && oracle::in_frustum(m.views[t.view], d.to_vector());
    const auto ref = oracle::view_pixel(m.views[t.view], side, d.to_vector());
    const double err = ref ? std::hypot((*ref)[0] - t.view_idx % side, (*ref)[1] - double(t.view_idx / side)) : 1e9;
    worst[int(t.tag)] = std::max(worst[int(t.tag)], err);
  }
  std::size_t transposed = 0;
  bool symmetric = true;
  for (std::uint32_t k = 0; k < m.views.size(); ++k) {
    const auto rows = view_to_pano(m, k);
    for (std::size_t idx = 0; idx < rows.size(); ++idx)
      for (const auto& t : rows[idx]) {
        symmetric = symmetric && t.view == k && t.view_idx == idx &&
                    std::binary_search(m.triples.begin(), m.triples.end(), t, triple_less);
        ++transposed;
      }
  }
  symmetric = symmetric && transposed == m.triples.size();
  const bool ok = framed && symmetric && worst[0] <= 1.0 && worst[1] <= 1.0 && m.count(LinkTag::Antipodal) > 0;
  return {ok, fmt("direct %.3f px, antipodal %.3f px (tol 1 px), ", worst[0], worst[1]) +
                  (symmetric ? "transpose exact" : "transpose MISMATCH") + ", " + std::to_string(m.triples.size()) +
                  " triples"};
}

Outcome elevation() {
  bool bounds = true, linear = true;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const ElevationTrajectory t = sample_trajectory(50, seed);
    bounds = bounds && t.start_deg() > -20 && t.start_deg() < 20 && t.slope_deg() > -0.5 && t.slope_deg() < 0.5;
    for (std::size_t i = 0; i < t.size(); ++i) linear = linear && t.samples()[i] == t.start_deg() + t.slope_deg() * double(i);
  }
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> start(-20, 20), slope(-0.5, 0.5);
  const double sigma = 2.0;
  std::normal_distribution<double> noise(0.0, sigma);
  double exact_err = 0.0, worst_z = 0.0;
  int within = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double s0 = start(rng), k = slope(rng);
    const int n = 60;
    std::vector<double> clean(n), noisy(n);
    for (int t = 0; t < n; ++t) {
      clean[t] = s0 + k * t;
      noisy[t] = clean[t] + noise(rng);
    }
    const ElevationTrajectory a = fit_line({0, clean, "acceptance"});
    exact_err = std::max({exact_err, std::abs(a.slope_deg() - k), std::abs(a.start_deg() - s0)});
    const ElevationTrajectory b = fit_line({0, noisy, "acceptance"});
    const double mean_t = (n - 1) / 2.0;
    double sxx = 0;
    for (int t = 0; t < n; ++t) sxx += (t - mean_t) * (t - mean_t);
    const double se_slope = sigma / std::sqrt(sxx);
    const double se_icpt = sigma * std::sqrt(1.0 / n + mean_t * mean_t / sxx);
    const double z = std::max(std::abs(b.slope_deg() - k) / se_slope, std::abs(b.start_deg() - s0) / se_icpt);
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++within;
  }
  const bool ok = bounds && linear && exact_err <= 1e-9 && within == 100;
  return {ok, std::string(bounds ? "bounds ok" : "bounds VIOLATED") + (linear ? ", linear" : ", NOT linear") +
                  fmt(", noiseless error %.3g, %.0f/100 noisy fits within 3 SE (worst %.2f SE)", exact_err,
                      double(within), worst_z)};
}

Outcome flow_filter() {
  auto stats = [](int moving) {
    std::vector<float> v(100, 0.02f);
    for (int i = 0; i < moving; ++i) v[i] = 0.4f;
    return FlowStats(v);
  };
  const bool drop9 = !static_filter(stats(9));
  const bool keep10 = static_filter(stats(10));
  const bool keep_all = static_filter(stats(100));
  return {drop9 && keep10 && keep_all, std::string("9% ") + (drop9 ? "dropped" : "KEPT") + ", 10% " +
                                           (keep10 ? "kept" : "DROPPED") + ", 100% " + (keep_all ? "kept" : "DROPPED")};
}

Outcome evaluation_poses() {
  const auto v = eval_views();
  bool ok = v.size() == 4;
  for (std::size_t i = 0; ok && i < 4; ++i) {
    ok = v[i].fov_deg() == 90.0 && v[i].dir().pitch() == 0.0 &&
         std::abs(std::remainder(v[i].dir().yaw() - deg_to_rad(90.0 * double(i)), kTwoPi)) <= 1e-12;
  }
  return {ok, std::to_string(v.size()) + " views at fov 90, pitch 0, yaw 0/90/180/270"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "pano360_acceptance";
  fs::remove_all(root);
  std::ostringstream out1, out2, err;
  const int c1 = cli::run({"mask", "--sample", "--seed", "7", "--output", (root / "a").string()}, out1, err);
  const int c2 = cli::run({"mask", "--sample", "--seed", "7", "--output", (root / "b").string()}, out2, err);
  if (c1 != 0 || c2 != 0) return {false, "mask command failed: " + err.str()};
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    if (fs::exists(other) && slurp(e.path()) == slurp(other)) ++same;
  }
  std::size_t files_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "b")) files_b += e.is_regular_file();
  std::string r1 = out1.str(), r2 = out2.str();
  const auto strip = [](std::string s) {
    const auto p = s.find("\"output\"");
    if (p != std::string::npos) s.erase(p, s.find('\n', p) - p);
    return s;
  };
  const bool ok = files > 0 && same == files && files_b == files && strip(r1) == strip(r2);
  return {ok, std::to_string(same) + "/" + std::to_string(files) + " artifacts bit-identical"};
}

Outcome attention_toy() {
  CrossDomainMask toy;
  toy.pano_height = 1;
  toy.pano_width = 1;
  toy.view_width = 16;
  toy.view_height = 1;
  const int peak = 7;
  for (const auto& [idx, w] : gaussian_splat(peak, 0, 16, 1, 1.0, 1.0, 1e-3)) toy.triples.push_back({0, 0, idx, LinkTag::Direct, w});
  const Grid<float> bias = attention_bias(toy, 0, 5.0, 0.0);
  double total = 0.0, near = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double e = std::exp(double(bias.at(k, 0)));
    total += e;
    if (std::abs(k - peak) <= 3) near += e;  // blur radius ceil(3 sigma)
  }
  return {near / total >= 0.9, fmt("neighborhood mass %.4f (tol >= 0.9)", near / total)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> fn;
  };
  const Criterion criteria[] = {
      {"antipode involution", 1, antipode_involution},
      {"projection round trip PSNR", 10, round_trip_psnr},
      {"analytic mask area", 5, mask_area},
      {"icosahedron view set", 30, icosahedron},
      {"inscribed rectangle vs brute force", 30, inscribed_rect},
      {"circular padding", 5, circular_padding},
      {"cross-domain mask consistency", 60, cross_mask_consistency},
      {"elevation trajectory", 5, elevation},
      {"flow filter boundary", 1, flow_filter},
      {"evaluation poses", 1, evaluation_poses},
      {"end-to-end determinism", 30, determinism},
      {"attention-bias sanity", 1, attention_toy},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("%s %2d %-36s %7.3fs (limit %gs)  %s\n", pass ? "PASS" : "FAIL", index, c.name, secs, c.limit_s,
                o.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
