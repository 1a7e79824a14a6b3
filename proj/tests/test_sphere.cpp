#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "pano360/sphere.hpp"

using namespace pano360;

TEST_CASE("pixel_to_dir: canvas center is the forward horizon") {
  const int h = 256, w = 512;
  const SphereDir d = pixel_to_dir(w / 2.0 - 0.5, h / 2.0 - 0.5, h, w);
  CHECK(std::abs(d.yaw()) < 1e-15);
  CHECK(std::abs(d.pitch()) < 1e-15);
}

TEST_CASE("pixel_to_dir: corner pixel center") {
  const SphereDir d = pixel_to_dir(0, 0, 256, 512);
  CHECK(std::abs(d.yaw() - (-kPi + kPi / 512)) < 1e-15);
  CHECK(std::abs(d.pitch() - (kHalfPi - kPi / 512)) < 1e-15);
}

TEST_CASE("pixel_to_dir: preconditions") {
  CHECK_THROWS_AS(pixel_to_dir(-0.5, 0, 256, 512), std::out_of_range);
  CHECK_THROWS_AS(pixel_to_dir(512, 0, 256, 512), std::out_of_range);
  CHECK_THROWS_AS(pixel_to_dir(0, 256, 256, 512), std::out_of_range);
  CHECK_THROWS_AS(pixel_to_dir(0, 0, 256, 500), std::invalid_argument);
}

TEST_CASE("dir_to_pixel: forward and seam") {
  const PixelCoord c = dir_to_pixel(SphereDir(0, 0), 256, 512);
  CHECK(c.u == doctest::Approx(255.5));
  CHECK(c.v == doctest::Approx(127.5));
  const PixelCoord s = dir_to_pixel(SphereDir(-kPi, 0), 256, 512);
  CHECK(s.u == doctest::Approx(511.5));
  CHECK(s.v == doctest::Approx(127.5));
}

TEST_CASE("pixel/dir round trip over random pixels") {
  std::mt19937_64 rng(1);
  const int h = 256, w = 512;
  // rows beyond the last pixel center (v > H - 0.5) clamp to the pole and are not invertible
  std::uniform_real_distribution<double> uu(0.0, w), uv(0.0, h - 0.5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = uu(rng), v = uv(rng);
    const PixelCoord p = dir_to_pixel(pixel_to_dir(u, v, h, w), h, w);
    double du = std::abs(p.u - u);
    du = std::min(du, w - du);  // the wrap is circular
    worst = std::max({worst, du, std::abs(p.v - v)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("dir/pixel round trip over uniform random directions") {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SphereDir d = SphereDir::from_vector(oracle::random_unit(rng));
    const PixelCoord p = dir_to_pixel(d, 128, 256);
    if (p.v < 0.0 || p.v >= 128) continue;  // polar caps beyond the last pixel center
    worst = std::max(worst, angular_distance(d, pixel_to_dir(p.u, p.v, 128, 256)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("pixel_to_dir clamps rows past the last pixel center to the pole") {
  CHECK(pixel_to_dir(0, 255.9, 256, 512).pitch() == -kHalfPi);
  CHECK(pixel_to_dir(0, 255.5, 256, 512).pitch() == doctest::Approx(-kHalfPi));
}

TEST_CASE("SphereDir wraps yaw and rejects out-of-range pitch") {
  CHECK(SphereDir(kPi, 0).yaw() == doctest::Approx(-kPi));
  CHECK(SphereDir(3 * kPi + 0.25, 0).yaw() == doctest::Approx(-kPi + 0.25));
  CHECK(SphereDir(-kPi, 0).yaw() == -kPi);
  CHECK_THROWS_AS(SphereDir(0, kHalfPi + 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(SphereDir(0, std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(SphereDir(0, -kHalfPi));
  for (double a : {-100.0, -7.0, -kPi, 0.0, 1.0, kPi, 12.5, 1e6}) {
    const double w = wrap_angle(a);
    CHECK(w >= -kPi);
    CHECK(w < kPi);
    CHECK(std::abs(std::remainder(w - a, kTwoPi)) < 1e-9);
  }
}

TEST_CASE("antipode examples") {
  const SphereDir a = antipode(SphereDir(0, 0));
  CHECK(a.yaw() == doctest::Approx(-kPi));
  CHECK(a.pitch() == 0.0);
  const SphereDir b = antipode(SphereDir(kHalfPi, kPi / 6));
  CHECK(b.yaw() == doctest::Approx(-kHalfPi));
  CHECK(b.pitch() == doctest::Approx(-kPi / 6));
}

TEST_CASE("antipode is an involution and opposes the unit vector") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const SphereDir d = SphereDir::from_vector(oracle::random_unit(rng));
    const SphereDir back = antipode(antipode(d));
    REQUIRE(std::abs(back.yaw() - d.yaw()) < 1e-12);
    REQUIRE(back.pitch() == d.pitch());
    REQUIRE(std::abs(antipode(d).pitch()) == std::abs(d.pitch()));
    const Vec3 v = d.to_vector(), o = antipode(d).to_vector();
    REQUIRE(dot(v, o) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("CameraPose validates fov") {
  CHECK_THROWS_AS(CameraPose::from_degrees(0.0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(CameraPose::from_degrees(180.0, 0, 0), std::invalid_argument);
  CHECK_NOTHROW(CameraPose::from_degrees(179.0, 0, 0));
}

TEST_CASE("PoseTrajectory requires a shared fov") {
  CHECK_THROWS_AS(PoseTrajectory({}), std::invalid_argument);
  CHECK_THROWS_AS(PoseTrajectory({CameraPose::from_degrees(90, 0, 0), CameraPose::from_degrees(80, 0, 0)}),
                  std::invalid_argument);
  CHECK(PoseTrajectory({CameraPose::from_degrees(90, 0, 0)}).fov_deg() == 90.0);
}

TEST_CASE("PinholeCamera: principal point, rays and frustum agree with rotation oracle") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> yaw(-180, 180), pitch(-89, 89), fov(20, 150);
  for (int i = 0; i < 200; ++i) {
    const CameraPose pose = CameraPose::from_degrees(fov(rng), yaw(rng), pitch(rng));
    const PinholeCamera cam(pose, 64);
    const Vec3 center = cam.ray(31.5, 31.5);
    REQUIRE(dot(center, pose.dir().to_vector()) == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 50; ++k) {
      const Vec3 d = oracle::random_unit(rng);
      REQUIRE(cam.contains(d) == oracle::in_frustum(pose, d));
      double x, y;
      if (cam.project(d, x, y)) {
        const auto ref = oracle::view_pixel(pose, 64, d);
        REQUIRE(ref.has_value());
        REQUIRE(std::abs(x - (*ref)[0]) < 1e-7);
        REQUIRE(std::abs(y - (*ref)[1]) < 1e-7);
      }
    }
  }
}

TEST_CASE("PinholeCamera: image axes follow increasing yaw and decreasing pitch") {
  const PinholeCamera cam(CameraPose::from_degrees(90, 0, 0), 64);
  const SphereDir right = SphereDir::from_vector(cam.ray(63, 31.5));
  const SphereDir down = SphereDir::from_vector(cam.ray(31.5, 63));
  CHECK(right.yaw() > 0.0);
  CHECK(down.pitch() < 0.0);
}

TEST_CASE("icosahedron_views: count, ordering and spacing") {
  const auto views = icosahedron_views();
  REQUIRE(views.size() == 20);
  double min_angle = kPi;
  Vec3 centroid{0, 0, 0};
  for (std::size_t i = 0; i < views.size(); ++i) {
    CHECK(views[i].fov_deg() == kIcosahedronFovDeg);
    const Vec3 v = views[i].dir().to_vector();
    for (int k = 0; k < 3; ++k) centroid[k] += v[k];
    for (std::size_t j = i + 1; j < views.size(); ++j) {
      min_angle = std::min(min_angle, angular_distance(views[i].dir(), views[j].dir()));
    }
    if (i > 0) {
      const double p0 = views[i - 1].dir().pitch(), p1 = views[i].dir().pitch();
      CHECK(p0 >= p1 - 1e-9);
      if (std::abs(p0 - p1) < 1e-9) CHECK(views[i - 1].dir().yaw() < views[i].dir().yaw());
    }
  }
  CHECK(std::abs(rad_to_deg(min_angle) - rad_to_deg(std::acos(std::sqrt(5.0) / 3.0))) <= 0.01);
  CHECK(std::sqrt(dot(centroid, centroid)) < 1e-9);
  // no face center on a pole
  for (const auto& v : views) CHECK(std::abs(v.dir().pitch()) < kHalfPi - 0.1);
  CHECK(icosahedron_views() == views);
}

TEST_CASE("icosahedron_views: Monte-Carlo coverage at the default fov") {
  const auto views = icosahedron_views();
  std::mt19937_64 rng(5);
  int uncovered = 0;
  for (int i = 0; i < 100000; ++i) {
    const Vec3 d = oracle::random_unit(rng);
    bool hit = false;
    for (const auto& v : views) hit = hit || oracle::in_frustum(v, d);
    uncovered += hit ? 0 : 1;
  }
  CHECK(uncovered == 0);
}

TEST_CASE("eval_views") {
  const auto v = eval_views();
  REQUIRE(v.size() == 4);
  const double yaws[] = {0.0, 90.0, 180.0, 270.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(v[i].fov_deg() == 90.0);
    CHECK(v[i].dir().pitch() == 0.0);
    CHECK(std::remainder(v[i].dir().yaw() - deg_to_rad(yaws[i]), kTwoPi) == doctest::Approx(0.0).scale(1e-12));
  }
  CHECK(eval_views() == v);
}

TEST_CASE("pose trajectory file round trip and theta alias") {
  const auto dir = std::filesystem::temp_directory_path() / "pano360_sphere_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "poses.json");
    f << R"([{"fov_deg": 90, "yaw_deg": 10, "pitch_deg": 5}, {"fov_deg": 90, "theta": -20, "pitch_deg": 6}])";
  }
  const PoseTrajectory t = load_trajectory(dir / "poses.json");
  REQUIRE(t.size() == 2);
  CHECK(rad_to_deg(t[1].dir().yaw()) == doctest::Approx(-20));
  save_trajectory(t, dir / "copy.json");
  const PoseTrajectory again = load_trajectory(dir / "copy.json");
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(again[i].dir().yaw() == doctest::Approx(t[i].dir().yaw()).epsilon(1e-14));
    CHECK(again[i].dir().pitch() == doctest::Approx(t[i].dir().pitch()).epsilon(1e-14));
  }
  {
    std::ofstream f(dir / "bad.json");
    f << R"([{"fov_deg": 90, "pitch_deg": 5}])";
  }
  CHECK_THROWS_AS(load_trajectory(dir / "bad.json"), std::runtime_error);
  CHECK_THROWS_AS(load_trajectory(dir / "missing.json"), std::runtime_error);
}
