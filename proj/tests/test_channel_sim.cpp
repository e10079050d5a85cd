#include <doctest.h>

#include <cmath>

#include "ipt/channel_sim.hpp"
#include "ipt/color.hpp"
#include "ipt/modulate.hpp"
#include "ipt/tag_map.hpp"
#include "test_support.hpp"

using namespace ipt;

namespace {

constexpr double kPi = 3.14159265358979323846;

Pose nadir_camera(double x, double y, double h, double yaw_rad = 0) {
  // Camera z looks straight down; yaw rotates about the vertical.
  Eigen::Matrix3d base;
  base << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  Pose p;
  p.convention = FrameConvention::CAMERA_TO_WORLD;
  p.rotation = Eigen::AngleAxisd(yaw_rad, Eigen::Vector3d::UnitZ()).toRotationMatrix() * base;
  p.translation = {x, y, h};
  return p;
}

CameraIntrinsics simple_intrinsics(int w, int h, double f) {
  return {f, f, w / 2.0, h / 2.0, w, h};
}

}  // namespace

TEST_CASE("project_point") {
  const CameraIntrinsics intr = simple_intrinsics(800, 600, 800.0);
  const Pose cam = nadir_camera(0, 0, 0.8).inverted();  // world -> camera

  SUBCASE("optical axis hits the principal point") {
    const Eigen::Vector2d uv = project_point(intr, cam, {0, 0, 0});
    CHECK(uv.x() == doctest::Approx(400.0));
    CHECK(uv.y() == doctest::Approx(300.0));
  }
  SUBCASE("similar triangles: u = u0 + fx * x / h") {
    const Eigen::Vector2d uv = project_point(intr, cam, {0.1, 0, 0});
    CHECK(uv.x() == doctest::Approx(400.0 + 800.0 * 0.1 / 0.8));
    CHECK(uv.y() == doctest::Approx(300.0));
  }
  SUBCASE("point behind the camera") {
    CHECK_THROWS_AS(project_point(intr, cam, {0, 0, 5.0}), PipelineError);
  }
}

TEST_CASE("render_view") {
  TagMapConfig cfg;
  cfg.family = ipt::test::load_tag36h11();
  cfg.rows = 3;
  cfg.cols = 3;
  cfg.map_width = 360;
  cfg.map_height = 360;
  cfg.tag_side = 96;
  cfg.ratio_x = 0.001;
  cfg.ratio_y = 0.001;
  const TagMapImage map = generate_map(cfg);
  ImagePlane screen = ImagePlane::srgb8(360, 360);
  for (int y = 0; y < 360; ++y) {
    for (int x = 0; x < 360; ++x) {
      for (int c = 0; c < 3; ++c) screen.at_u8(x, y, c) = map.image.at_u8(x, y);
    }
  }
  const ScreenGeometry geom{360, 360, 0.001, 0.001};

  SUBCASE("nadir view that exactly frames the map matches a direct resize") {
    // Principal point at the geometric image center ((w-1)/2 in pixel-center
    // coordinates) and f = h / (scale * ratio) make the view a pure resize.
    const int cw = 240;
    const double h = 0.9;
    const double scale = 360.0 / cw;
    const CameraIntrinsics intr{h / (scale * geom.ratio_x), h / (scale * geom.ratio_y),
                                (cw - 1) / 2.0, (cw - 1) / 2.0, cw, cw};
    const ImagePlane view = render_view(screen, geom, intr, nadir_camera(0, 0, h));
    const ImagePlane resized = resize_bilinear(screen, cw, cw);
    const ImagePlane a = srgb_lightness_u8(view);
    const ImagePlane b = srgb_lightness_u8(resized);
    CHECK(ipt::test::ssim(a, b) > 0.95);
  }

  SUBCASE("90-degree yaw equals rotating the rendered image") {
    const CameraIntrinsics intr{500, 500, 99.5, 99.5, 200, 200};
    const ImagePlane straight = render_view(screen, geom, intr, nadir_camera(0, 0, 1.0));
    const ImagePlane yawed =
        render_view(screen, geom, intr, nadir_camera(0, 0, 1.0, kPi / 2));
    // With the principal point at the exact center, yawing the camera 90 deg
    // permutes pixels: yawed(199 - v, u) == straight(u, v).
    int mismatches = 0;
    for (int v = 0; v < 200; ++v) {
      for (int u = 0; u < 200; ++u) {
        for (int c = 0; c < 3; ++c) {
          if (std::abs(static_cast<int>(straight.at_u8(u, v, c)) -
                       static_cast<int>(yawed.at_u8(199 - v, u, c))) > 1) {
            ++mismatches;
          }
        }
      }
    }
    CHECK(mismatches < 200 * 200 * 3 / 100);  // < 1% differing samples
  }

  SUBCASE("camera over empty region sees black") {
    const CameraIntrinsics intr = simple_intrinsics(64, 64, 200.0);
    const ImagePlane view = render_view(screen, geom, intr, nadir_camera(5.0, 5.0, 0.5));
    for (uint8_t v : view.u8()) CHECK(v == 0);
  }

  SUBCASE("camera parallel to the plane is degenerate") {
    Pose side;
    side.convention = FrameConvention::CAMERA_TO_WORLD;
    side.rotation = Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitX()).toRotationMatrix() *
                    nadir_camera(0, 0, 1).rotation;
    side.translation = {0, 0, 1};
    const CameraIntrinsics intr = simple_intrinsics(64, 64, 200.0);
    CHECK_THROWS_AS(render_view(screen, geom, intr, side), PipelineError);
  }

  SUBCASE("projection and back-projection agree on the plane") {
    const CameraIntrinsics intr = simple_intrinsics(320, 240, 400.0);
    const Pose c2w = nadir_camera(0.05, -0.02, 1.2, 0.3);
    const Pose w2c = c2w.inverted();
    // A world point on z=0 projects to (u,v); the render ray through (u,v)
    // must land back on the same world point.
    const Eigen::Vector3d pw(0.07, 0.12, 0.0);
    const Eigen::Vector2d uv = project_point(intr, w2c, pw);
    const Eigen::Vector3d ray =
        c2w.rotation * Eigen::Vector3d((uv.x() - intr.u0) / intr.fx,
                                       (uv.y() - intr.v0) / intr.fy, 1.0);
    const double t = -c2w.translation.z() / ray.z();
    const Eigen::Vector3d hit = c2w.translation + t * ray;
    CHECK((hit - pw).norm() < 1e-9);
  }
}

TEST_CASE("apply_motion") {
  const ImagePlane img = ipt::test::textured_gray(64, 48, 4);
  SUBCASE("zero shift is identity") {
    const ImagePlane out = apply_motion(img, 0, 0);
    CHECK(std::equal(img.u8().begin(), img.u8().end(), out.u8().begin()));
  }
  SUBCASE("known pixel moves by the shift") {
    ImagePlane marked = ImagePlane::gray_u8(32, 32);
    marked.at_u8(10, 10) = 255;
    const ImagePlane out = apply_motion(marked, 2, 5);
    CHECK(static_cast<int>(out.at_u8(12, 15)) == 255);
  }
  SUBCASE("shift then unshift is identity away from the border band") {
    const ImagePlane out = apply_motion(apply_motion(img, 3, 0), -3, 0);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 3; x < img.width() - 3; ++x) {
        CHECK(out.at_u8(x, y) == img.at_u8(x, y));
      }
    }
  }
  SUBCASE("shift bound enforced") {
    CHECK_THROWS_AS(apply_motion(img, 33, 0), ParamError);
  }
}

TEST_CASE("apply_noise") {
  const ImagePlane img = ipt::test::random_srgb(200, 100, 55);
  SUBCASE("sigma 0 is identity") {
    const ImagePlane out = apply_noise(img, 0.0, 9);
    CHECK(std::equal(img.u8().begin(), img.u8().end(), out.u8().begin()));
  }
  SUBCASE("same seed twice is identical") {
    const ImagePlane a = apply_noise(img, 2.0, 1234);
    const ImagePlane b = apply_noise(img, 2.0, 1234);
    CHECK(std::equal(a.u8().begin(), a.u8().end(), b.u8().begin()));
  }
  SUBCASE("sample stddev of the L* perturbation is near sigma") {
    // Mid-gray carrier avoids clamping; >= 1e6 pixels.
    ImagePlane gray = ImagePlane::srgb8(1024, 1024);
    std::fill(gray.u8().begin(), gray.u8().end(), uint8_t{120});
    const ImagePlane noisy = apply_noise(gray, 2.0, 77);
    const ImagePlane l0 = rgb_to_lab(gray, LabScale::Byte);
    const ImagePlane l1 = rgb_to_lab(noisy, LabScale::Byte);
    double sum = 0, sq = 0;
    const size_t n = static_cast<size_t>(gray.width()) * gray.height();
    for (size_t i = 0; i < n; ++i) {
      const double d = l1.f32()[3 * i] - l0.f32()[3 * i];
      sum += d;
      sq += d * d;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sq / n - mean * mean);
    CHECK(stddev > 1.8);
    CHECK(stddev < 2.2);
  }
}

TEST_CASE("apply_shadow") {
  const ImagePlane img = ipt::test::random_srgb(60, 40, 66);
  const std::vector<Eigen::Vector2d> box{{10, 10}, {30, 10}, {30, 25}, {10, 25}};
  SUBCASE("attenuation 1 is identity") {
    const ImagePlane out = apply_shadow(img, box, 1.0);
    CHECK(std::equal(img.u8().begin(), img.u8().end(), out.u8().begin()));
  }
  SUBCASE("attenuation 0 zeroes L* inside the polygon") {
    // Gray content: with a* = b* = 0 the sRGB round trip preserves L* = 0
    // exactly. (Chromatic pixels keep their chroma by contract; their
    // re-encoded lightness is only near zero.)
    ImagePlane gray = ImagePlane::srgb8(60, 40);
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 60; ++x) {
        for (int c = 0; c < 3; ++c) {
          gray.at_u8(x, y, c) = static_cast<uint8_t>(60 + (x * 3 + y) % 150);
        }
      }
    }
    const ImagePlane out = apply_shadow(gray, box, 0.0);
    const ImagePlane l = rgb_to_lab(out, LabScale::Byte);
    for (int y = 11; y < 24; ++y) {
      for (int x = 11; x < 29; ++x) {
        CHECK(l.at_f32(x, y, 0) < 1.0);
      }
    }
    // Outside stays put.
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 60; ++x) {
        CHECK(out.at_u8(x, y, 0) == gray.at_u8(x, y, 0));
      }
    }
    // Colored content must at least darken inside the polygon.
    const ImagePlane colored = apply_shadow(img, box, 0.0);
    const ImagePlane l_in = rgb_to_lab(img, LabScale::Byte);
    const ImagePlane l_out = rgb_to_lab(colored, LabScale::Byte);
    for (int y = 11; y < 24; ++y) {
      for (int x = 11; x < 29; ++x) {
        if (l_in.at_f32(x, y, 0) > 5.0f) {
          CHECK(l_out.at_f32(x, y, 0) < l_in.at_f32(x, y, 0));
        }
      }
    }
  }
  SUBCASE("degenerate polygon rejected") {
    CHECK_THROWS_AS(apply_shadow(img, {{0, 0}, {1, 1}}, 0.5), ParamError);
  }
}

TEST_CASE("simulate_capture") {
  TagMapConfig cfg;
  cfg.family = ipt::test::load_tag36h11();
  cfg.rows = 2;
  cfg.cols = 2;
  cfg.map_width = 240;
  cfg.map_height = 240;
  cfg.tag_side = 80;
  cfg.ratio_x = 0.001;
  cfg.ratio_y = 0.001;
  const TagMapImage map = generate_map(cfg);

  ModulationConfig mod;
  mod.input_fps = 60;
  mod.output_fps = 120;
  mod.delta_l = 4.0f;
  mod.out_width = 240;
  mod.out_height = 240;
  mod.mask = map.mask;
  ImagePlane content = ImagePlane::srgb8(240, 240);
  std::fill(content.u8().begin(), content.u8().end(), uint8_t{128});
  const auto modulated = modulate_frame(content, mod);

  CaptureScenario scen;
  scen.intrinsics = simple_intrinsics(160, 160, 320.0);
  scen.screen = {240, 240, 0.001, 0.001};
  scen.camera_fps = 120;
  scen.seed = 5;
  for (int k = 0; k < 6; ++k) {
    scen.trajectory.push_back({k / 120.0, nadir_camera(0, 0, 0.45)});
  }

  SUBCASE("frame and ground-truth counts match the trajectory") {
    const CaptureResult result = simulate_capture(scen, modulated);
    CHECK(result.frames.size() == 6);
    CHECK(result.ground_truth.size() == 6);
  }

  SUBCASE("replay with the same seed is bit-identical") {
    CaptureScenario noisy = scen;
    noisy.noise_sigma = 2.0;
    const CaptureResult a = simulate_capture(noisy, modulated);
    const CaptureResult b = simulate_capture(noisy, modulated);
    for (size_t k = 0; k < a.frames.size(); ++k) {
      CHECK(std::equal(a.frames[k].u8().begin(), a.frames[k].u8().end(),
                       b.frames[k].u8().begin()));
    }
  }

  SUBCASE("static capture: successive frames differ only by the tag pattern") {
    const CaptureResult result = simulate_capture(scen, modulated);
    const ImagePlane l0 = srgb_lightness_u8(result.frames[0]);
    const ImagePlane l1 = srgb_lightness_u8(result.frames[1]);
    // Where the rendered mask is zero the frames must agree; where it is
    // +/-1 they must differ by about 2*delta (resampling softens edges).
    int strong = 0, weak = 0;
    for (int y = 0; y < 160; ++y) {
      for (int x = 0; x < 160; ++x) {
        const int d = std::abs(static_cast<int>(l0.at_u8(x, y)) -
                               static_cast<int>(l1.at_u8(x, y)));
        if (d >= 6) ++strong;
        if (d >= 1 && d <= 2) ++weak;
      }
    }
    CHECK(strong > 2000);  // tag cells flicker
    // Frames 0 and 2 show the same phase: identical up to nothing at all.
    const ImagePlane l2 = srgb_lightness_u8(result.frames[2]);
    CHECK(std::equal(l0.u8().begin(), l0.u8().end(), l2.u8().begin()));
  }
}

TEST_CASE("scenario JSON and ground-truth CSV round trip") {
  CaptureScenario scen;
  scen.intrinsics = simple_intrinsics(320, 240, 400.0);
  scen.screen = {1920, 2160, 2.17 / 1920, 2.47 / 2160};
  scen.camera_fps = 120;
  scen.noise_sigma = 1.5;
  scen.seed = 42;
  scen.shadow = ShadowSpec{{{-0.9, -1.0}, {-0.5, -1.0}, {-0.5, -0.6}, {-0.9, -0.6}}, 0.1};
  for (int k = 0; k < 4; ++k) {
    scen.trajectory.push_back(
        {k / 120.0, nadir_camera(0.01 * k, -0.02 * k, 2.0 + 0.01 * k, 0.05 * k)});
  }

  const auto dir = std::filesystem::temp_directory_path() / "ipt_scenario_test";
  std::filesystem::create_directories(dir);
  scen.save(dir / "scenario.json");
  const CaptureScenario back = CaptureScenario::load(dir / "scenario.json");
  CHECK(back.trajectory.size() == 4);
  CHECK(back.noise_sigma == doctest::Approx(1.5));
  CHECK(back.shadow.has_value());
  CHECK(back.shadow->attenuation == doctest::Approx(0.1));
  for (size_t k = 0; k < 4; ++k) {
    CHECK((back.trajectory[k].pose.translation - scen.trajectory[k].pose.translation)
              .norm() < 1e-9);
    CHECK((back.trajectory[k].pose.rotation - scen.trajectory[k].pose.rotation)
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }

  write_ground_truth_csv(dir / "gt.csv", scen.trajectory);
  const auto poses = read_ground_truth_csv(dir / "gt.csv");
  REQUIRE(poses.size() == 4);
  for (size_t k = 0; k < 4; ++k) {
    CHECK((poses[k].pose.translation - scen.trajectory[k].pose.translation).norm() < 1e-9);
  }
  std::filesystem::remove_all(dir);
}
