#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pano360/cross_mask.hpp"
#include "pano360/datapipe.hpp"
#include "pano360/elevation.hpp"
#include "pano360/frame_io.hpp"
#include "pano360/maskgen.hpp"
#include "pano360/resample.hpp"
#include "pano360/sphere.hpp"

namespace pano360::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Settings shared by the subcommands; also loadable from a key=value config file.
struct RunConfig {
  int height = 0;  // 0: command default
  double fov_deg = 0.0;
  int side = 0;
  double sigma = 1.0;
  double antipodal_weight = 1.0;
  double lambda_direct = 1.0;
  double lambda_antipodal = 1.0;
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
  std::string format = "png";
  bool nearest = false;
  std::string interp = "bilinear";
};

int or_default(int v, int fallback) { return v > 0 ? v : fallback; }
double or_default(double v, double fallback) { return v > 0.0 ? v : fallback; }

json pose_json(const CameraPose& p) {
  return {{"fov_deg", p.fov_deg()},
          {"yaw_deg", rad_to_deg(p.dir().yaw())},
          {"pitch_deg", rad_to_deg(p.dir().pitch())}};
}

std::string sequence_spec(const fs::path& dir, const std::string& name, const std::string& format) {
  if (format == "f32") return (dir / (name + ".f32")).string();
  return (dir / name / "%04d.png").string();
}

void write_json(const json& doc, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Interp interp_of(const RunConfig& cfg) {
  if (cfg.nearest || cfg.interp == "nearest") return Interp::Nearest;
  return cfg.interp == "bicubic" ? Interp::Bicubic : Interp::Bilinear;
}

// One pose per frame; a single pose is reused for every frame.
PoseTrajectory poses_for_frames(const PoseTrajectory& traj, std::size_t frames) {
  if (traj.size() == frames) return traj;
  if (traj.size() == 1) return PoseTrajectory(std::vector<CameraPose>(frames, traj[0]));
  throw std::invalid_argument("pose file has " + std::to_string(traj.size()) + " poses for " +
                              std::to_string(frames) + " frames");
}

struct ProjectArgs {
  std::string direction;
  std::string poses;
  bool eval_views = false;
};

int cmd_project(const RunConfig& cfg, const ProjectArgs& args, std::ostream& out) {
  if (args.eval_views == !args.poses.empty()) {
    throw std::invalid_argument("project: give exactly one of --poses or --eval-views");
  }
  const Interp interp = interp_of(cfg);
  const std::vector<Image> frames = read_frames(cfg.input);
  const fs::path out_dir = cfg.output;
  json report{{"direction", args.direction}, {"frames", frames.size()}};

  if (args.direction == "e2p") {
    std::vector<PoseTrajectory> tracks;
    if (args.eval_views) {
      for (const auto& pose : eval_views()) tracks.push_back(poses_for_frames(PoseTrajectory({pose}), frames.size()));
    } else {
      tracks.push_back(poses_for_frames(load_trajectory(args.poses), frames.size()));
    }
    report["views"] = json::array();
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      std::vector<Image> views;
      int side = 0;
      for (std::size_t t = 0; t < frames.size(); ++t) {
        const PanoCanvas canvas(frames[t]);
        side = or_default(cfg.side, canvas.height() / 2);
        views.push_back(e2p(canvas, tracks[k][t], side, interp).image());
      }
      const std::string spec = sequence_spec(out_dir, "view" + std::to_string(k), cfg.format);
      write_frames(views, spec);
      json entry = pose_json(tracks[k][0]);
      entry["side"] = side;
      entry["output"] = spec;
      report["views"].push_back(entry);
    }
  } else if (args.direction == "p2e") {
    if (args.eval_views) throw std::invalid_argument("project: --eval-views applies to e2p only");
    const PoseTrajectory traj = poses_for_frames(load_trajectory(args.poses), frames.size());
    const int height = or_default(cfg.height, 512);
    std::vector<PerspView> anchor;
    for (std::size_t t = 0; t < frames.size(); ++t) anchor.emplace_back(frames[t], traj[t]);
    const VideoProjection proj = build_video_projection(anchor, traj, height, interp);

    std::vector<Image> canvases;
    for (const auto& c : proj.frames) canvases.push_back(c.image());
    const std::string spec = sequence_spec(out_dir, "frames", cfg.format);
    write_frames(canvases, spec);
    json mask_pixels = json::array();
    bool identical = true;
    for (std::size_t t = 0; t < proj.mask.size(); ++t) {
      const Mask& m = proj.mask[t];
      write_mask_png(m, frame_path((out_dir / "masks" / "%04d.png").string(), int(t)));
      mask_pixels.push_back(std::count(m.data().begin(), m.data().end(), std::uint8_t{1}));
      identical = identical && m == proj.mask[0];
    }
    report["height"] = height;
    report["output"] = spec;
    report["mask_pixels"] = mask_pixels;
    report["masks_identical"] = identical;
  } else {
    throw std::invalid_argument("project: --direction must be e2p or p2e");
  }
  out << report.dump(2) << '\n';
  return 0;
}

struct RoundTripArgs {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  int erode = 2;
  double min_psnr = 35.0;
};

int cmd_roundtrip(const RunConfig& cfg, const RoundTripArgs& args, std::ostream& out) {
  const std::vector<Image> frames = read_frames(cfg.input);
  const CameraPose pose = CameraPose::from_degrees(or_default(cfg.fov_deg, 90.0), args.yaw_deg,
                                                   args.pitch_deg);
  const PerspView view(frames.front(), pose);
  const int height = or_default(cfg.height, 512);
  const RoundTripReport r =
      round_trip(view, height, args.erode, interp_of(cfg));
  const bool passed = r.psnr_db >= args.min_psnr;
  out << json{{"height", height},
              {"side", view.side()},
              {"pose", pose_json(pose)},
              {"erode_px", args.erode},
              {"interp", cfg.nearest ? std::string("nearest") : cfg.interp},
              {"psnr_db", r.psnr_db},
              {"pixels", r.pixels},
              {"min_psnr_db", args.min_psnr},
              {"passed", passed}}
             .dump(2)
      << '\n';
  return passed ? 0 : 1;
}

struct MaskArgs {
  std::string trajectory;
  bool sample = false;
  int frames = 40;
  int dims = 16;
  std::string crop_mode = "fixed";
};

int cmd_mask(const RunConfig& cfg, const MaskArgs& args, std::ostream& out) {
  if (args.sample == !args.trajectory.empty()) {
    throw std::invalid_argument("mask: give exactly one of --trajectory or --sample");
  }
  const double fov = or_default(cfg.fov_deg, 90.0);
  const int height = or_default(cfg.height, 256);
  const int width = 2 * height;
  const PoseTrajectory traj = args.sample
                                  ? sample_trajectory(std::size_t(args.frames), cfg.seed).to_poses(fov)
                                  : load_trajectory(args.trajectory);
  const fs::path out_dir = cfg.output;

  std::vector<Mask> masks;
  json rects = json::array();
  json encodings = json::array();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    Mask m = projection_mask(traj[t], height);
    write_mask_png(m, frame_path((out_dir / "masks" / "%04d.png").string(), int(t)));
    const InscribedRect r = max_inscribed_rect(m);
    const double pitch = traj[t].dir().pitch();
    rects.push_back({{"frame", t},
                     {"x", r.x},
                     {"y", r.y},
                     {"w", r.width},
                     {"h", r.height},
                     {"center_x", r.center_x()},
                     {"center_y", r.center_y()},
                     {"pitch_deg", rad_to_deg(pitch)}});
    encodings.push_back({{"frame", t}, {"values", mask_pos_encoding(r, height, width, pitch, args.dims)}});
    masks.push_back(std::move(m));
  }
  const VideoMask vmask(std::move(masks), traj);
  write_json(rects, out_dir / "rects.json");
  write_json({{"dims_per_scalar", args.dims},
              {"scalars", {"center_x/W", "center_y/H", "w/W", "h/H", "pitch"}},
              {"frames", encodings}},
             out_dir / "posenc.json");
  save_trajectory(traj, out_dir / "trajectory.json");

  json report{{"frames", traj.size()}, {"height", height}, {"fov_deg", fov}, {"output", out_dir.string()}};
  if (args.sample) report["seed"] = cfg.seed;
  if (args.crop_mode == "fixed") {
    const Mask common = intersect_masks(vmask);
    if (std::count(common.data().begin(), common.data().end(), std::uint8_t{1}) == 0) {
      throw std::runtime_error("mask: frame masks share no pixel; no fixed anchor crop exists");
    }
    const InscribedRect a = max_inscribed_rect(common);
    report["anchor_rect"] = {{"x", a.x}, {"y", a.y}, {"w", a.width}, {"h", a.height}};
  } else if (args.crop_mode != "per-frame") {
    throw std::invalid_argument("mask: --crop-mode must be fixed or per-frame");
  }
  report["crop_mode"] = args.crop_mode;
  out << report.dump(2) << '\n';
  return 0;
}

struct AttnArgs {
  bool no_antipodal = false;
  int frames = 1;
  std::optional<int> emit_bias;
};

CrossDomainMask build_from_config(const RunConfig& cfg, bool antipodal, int default_height) {
  CrossMaskParams params;
  params.sigma = cfg.sigma;
  params.include_antipodal = antipodal;
  params.antipodal_weight = cfg.antipodal_weight;
  return build_cross_domain_mask(or_default(cfg.height, default_height),
                                 icosahedron_views(or_default(cfg.fov_deg, kIcosahedronFovDeg)),
                                 params, cfg.side);
}

int cmd_attnmask(const RunConfig& cfg, const AttnArgs& args, std::ostream& out) {
  CrossDomainMask mask = build_from_config(cfg, !args.no_antipodal, 64);
  if (args.frames < 1) throw std::invalid_argument("attnmask: --frames must be >= 1");
  mask.frames = args.frames;
  const fs::path out_dir = cfg.output;
  fs::create_directories(out_dir);
  save_cross_mask(mask, out_dir / "cross_mask.xdm", out_dir / "cross_mask.json",
                  cfg.lambda_direct, cfg.lambda_antipodal);
  json report{{"height", mask.pano_height},
              {"width", mask.pano_width},
              {"view_side", mask.view_width},
              {"views", mask.views.size()},
              {"frames", mask.frames},
              {"sigma", mask.params.sigma},
              {"direct_triples", mask.count(LinkTag::Direct)},
              {"antipodal_triples", mask.count(LinkTag::Antipodal)}};
  if (args.emit_bias) {
    const int frame = *args.emit_bias;
    if (frame < 0 || frame >= mask.frames) {
      throw std::invalid_argument("attnmask: --emit-bias frame out of range");
    }
    json files = json::array();
    for (std::uint32_t k = 0; k < mask.views.size(); ++k) {
      const Grid<float> bias = attention_bias(mask, k, cfg.lambda_direct, cfg.lambda_antipodal);
      const auto path = out_dir / ("bias_frame" + std::to_string(frame) + "_view" +
                                   std::to_string(k) + ".f32");
      write_frames({bias}, path.string());
      files.push_back(path.string());
    }
    report["bias_files"] = files;
  }
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  CrossDomainMask mask;
  if (!cfg.input.empty()) {
    const fs::path dir = cfg.input;
    mask = load_cross_mask(dir / "cross_mask.xdm", dir / "cross_mask.json");
  } else {
    mask = build_from_config(cfg, true, 32);
  }
  const ConsistencyReport r = check_consistency(mask);
  out << json{{"height", mask.pano_height},
              {"triples", mask.triples.size()},
              {"peaks_checked", r.peaks_checked},
              {"max_direct_error_px", r.max_direct_error_px},
              {"max_antipodal_error_px", r.max_antipodal_error_px},
              {"weights_in_range", r.weights_in_range},
              {"transpose_symmetric", r.transpose_symmetric},
              {"passed", r.ok()}}
             .dump(2)
      << '\n';
  return r.ok() ? 0 : 1;
}

struct FilterArgs {
  std::string manifest;
  std::string flow;
  double threshold = 0.1;
  double min_fraction = 0.10;
};

int cmd_filter(const RunConfig& cfg, const FilterArgs& args, std::ostream& out) {
  std::vector<ClipRecord> records = load_manifest(args.manifest);
  if (!args.flow.empty()) {
    const auto stats = load_flow_stats(args.flow);
    for (auto& r : records) {
      if (auto it = stats.find(r.id); it != stats.end()) {
        r.flow = it->second;
        validate(r);
      }
    }
  }
  std::vector<ClipRecord> kept;
  json dropped = json::array();
  for (const auto& r : records) {
    if (r.flow.empty()) throw std::runtime_error("filter: clip '" + r.id + "' has no flow statistics");
    if (static_filter(r.flow, args.threshold, args.min_fraction)) {
      kept.push_back(r);
    } else {
      dropped.push_back(r.id);
    }
  }
  const std::size_t written = build_manifest(kept, cfg.output);
  out << json{{"total", records.size()},
              {"kept", written},
              {"dropped", dropped},
              {"threshold", args.threshold},
              {"min_fraction", args.min_fraction},
              {"output", cfg.output}}
             .dump(2)
      << '\n';
  return 0;
}

int cmd_smooth(const RunConfig& cfg, const std::string& estimates, std::ostream& out) {
  const EstimateSeries series = load_estimates(estimates);
  const ElevationTrajectory fit = fit_line(series);
  json report{{"source", series.source},
              {"first_frame", series.first_frame},
              {"frames", fit.size()},
              {"intercept_deg", fit.start_deg()},
              {"slope_deg_per_frame", fit.slope_deg()},
              {"samples", fit.samples()}};
  if (!cfg.output.empty()) {
    save_trajectory(fit.to_poses(or_default(cfg.fov_deg, 90.0)), cfg.output);
    report["output"] = cfg.output;
  }
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_seamcheck(const RunConfig& cfg, std::optional<double> max_score, std::ostream& out) {
  const std::vector<Image> frames = read_frames(cfg.input);
  json scores = json::array();
  double worst = 0.0;
  for (const auto& f : frames) {
    const double s = seam_score(PanoCanvas(f).image());
    scores.push_back(s);
    worst = std::max(worst, s);
  }
  json report{{"frames", frames.size()}, {"scores", scores}, {"max_score", worst}};
  bool passed = true;
  if (max_score) {
    passed = worst <= *max_score;
    report["threshold"] = *max_score;
    report["passed"] = passed;
  }
  out << report.dump(2) << '\n';
  return passed ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical video geometry and conditioning toolkit", "pano360-cli"};
  app.set_config("--config", "", "key=value settings file");
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_geometry = [&](CLI::App* sub) {
    sub->add_option("--height", cfg.height, "Canvas height H (width is 2H)")->check(CLI::PositiveNumber);
    sub->add_option("--fov", cfg.fov_deg, "Field of view in degrees")->check(CLI::Range(0.0, 180.0));
    sub->add_option("--side", cfg.side, "Perspective view side in pixels")->check(CLI::NonNegativeNumber);
  };

  ProjectArgs project;
  auto* project_cmd = app.add_subcommand("project", "E2P or P2E reprojection of frame sequences");
  project_cmd->add_option("--input", cfg.input, "Input frames (pattern, directory, PNG or .f32)")->required();
  project_cmd->add_option("--output", cfg.output, "Output directory")->required();
  project_cmd->add_option("--direction", project.direction, "e2p or p2e")->required();
  project_cmd->add_option("--poses", project.poses, "Pose trajectory JSON");
  project_cmd->add_flag("--eval-views", project.eval_views, "Use the four horizon evaluation views");
  project_cmd->add_option("--format", cfg.format, "png or f32")->check(CLI::IsMember({"png", "f32"}));
  project_cmd->add_flag("--nearest", cfg.nearest, "Nearest-neighbour sampling");
  project_cmd->add_option("--interp", cfg.interp, "bilinear, nearest or bicubic")
      ->check(CLI::IsMember({"bilinear", "nearest", "bicubic"}));
  add_geometry(project_cmd);

  RoundTripArgs rt;
  auto* rt_cmd = app.add_subcommand("roundtrip", "p2e then e2p round trip PSNR");
  rt_cmd->add_option("--input", cfg.input, "Square perspective image")->required();
  rt_cmd->add_option("--yaw", rt.yaw_deg, "Yaw in degrees");
  rt_cmd->add_option("--pitch", rt.pitch_deg, "Pitch in degrees")->check(CLI::Range(-90.0, 90.0));
  rt_cmd->add_option("--erode", rt.erode, "Footprint erosion in canvas pixels")->check(CLI::NonNegativeNumber);
  rt_cmd->add_option("--min-psnr", rt.min_psnr, "Pass threshold in dB");
  rt_cmd->add_flag("--nearest", cfg.nearest, "Nearest-neighbour sampling");
  rt_cmd->add_option("--interp", cfg.interp, "bilinear, nearest or bicubic")
      ->check(CLI::IsMember({"bilinear", "nearest", "bicubic"}));
  add_geometry(rt_cmd);

  MaskArgs mask;
  auto* mask_cmd = app.add_subcommand("mask", "Video masks, inscribed rectangles and positional encodings");
  mask_cmd->add_option("--trajectory", mask.trajectory, "Pose trajectory JSON");
  mask_cmd->add_flag("--sample", mask.sample, "Sample an elevation trajectory");
  mask_cmd->add_option("--seed", cfg.seed, "Sampling seed");
  mask_cmd->add_option("--frames", mask.frames, "Frames for --sample")->check(CLI::PositiveNumber);
  mask_cmd->add_option("--dims", mask.dims, "Embedding size per scalar (even)");
  mask_cmd->add_option("--crop-mode", mask.crop_mode, "fixed or per-frame");
  mask_cmd->add_option("--output", cfg.output, "Output directory")->required();
  add_geometry(mask_cmd);

  AttnArgs attn;
  int bias_frame = -1;
  auto* attn_cmd = app.add_subcommand("attnmask", "Cross-domain spherical attention mask");
  attn_cmd->add_option("--sigma", cfg.sigma, "Gaussian blur sigma in view pixels")->check(CLI::NonNegativeNumber);
  attn_cmd->add_option("--antipodal-weight", cfg.antipodal_weight, "Peak weight of antipodal links");
  attn_cmd->add_option("--lambda-direct", cfg.lambda_direct, "Bias scale for direct links");
  attn_cmd->add_option("--lambda-antipodal", cfg.lambda_antipodal, "Bias scale for antipodal links");
  attn_cmd->add_flag("--no-antipodal", attn.no_antipodal, "Omit antipodal links");
  attn_cmd->add_option("--frames", attn.frames, "Frames to replicate the mask over");
  attn_cmd->add_option("--emit-bias", bias_frame, "Also write dense bias matrices for this frame");
  attn_cmd->add_option("--output", cfg.output, "Output directory")->required();
  add_geometry(attn_cmd);

  auto* validate_cmd = app.add_subcommand("validate", "Geometric consistency check of a cross-domain mask");
  validate_cmd->add_option("--input", cfg.input, "Directory written by attnmask (default: build one)");
  validate_cmd->add_option("--sigma", cfg.sigma, "Gaussian blur sigma when building")->check(CLI::NonNegativeNumber);
  add_geometry(validate_cmd);

  FilterArgs filter;
  auto* filter_cmd = app.add_subcommand("filter", "Drop static clips by optical-flow statistics");
  filter_cmd->add_option("--manifest", filter.manifest, "Input manifest (JSON lines)")->required();
  filter_cmd->add_option("--flow", filter.flow, "Flow statistics (JSON lines)");
  filter_cmd->add_option("--threshold", filter.threshold, "Per-frame flow threshold");
  filter_cmd->add_option("--min-fraction", filter.min_fraction, "Minimum fraction of moving frames");
  filter_cmd->add_option("--output", cfg.output, "Filtered manifest")->required();

  std::string estimates;
  auto* smooth_cmd = app.add_subcommand("smooth", "Linear fit of per-frame pitch estimates");
  smooth_cmd->add_option("--estimates", estimates, "Estimates (JSON lines)")->required();
  smooth_cmd->add_option("--output", cfg.output, "Write the fitted trajectory as pose JSON");
  smooth_cmd->add_option("--fov", cfg.fov_deg, "Field of view for the exported poses");

  double max_score = -1.0;
  auto* seam_cmd = app.add_subcommand("seamcheck", "Close-loop seam continuity score");
  seam_cmd->add_option("--input", cfg.input, "Canvas frames")->required();
  seam_cmd->add_option("--max-score", max_score, "Fail when any frame exceeds this score");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*project_cmd) return cmd_project(cfg, project, out);
    if (*rt_cmd) return cmd_roundtrip(cfg, rt, out);
    if (*mask_cmd) return cmd_mask(cfg, mask, out);
    if (*attn_cmd) {
      if (bias_frame >= 0) attn.emit_bias = bias_frame;
      return cmd_attnmask(cfg, attn, out);
    }
    if (*validate_cmd) return cmd_validate(cfg, out);
    if (*filter_cmd) return cmd_filter(cfg, filter, out);
    if (*smooth_cmd) return cmd_smooth(cfg, estimates, out);
    if (*seam_cmd) {
      return cmd_seamcheck(cfg, max_score >= 0.0 ? std::optional(max_score) : std::nullopt, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pano360-cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(int(argv.size()), argv.data(), out, err);
}

}  // namespace pano360::cli
