#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "ipt/camera.hpp"
#include "ipt/image.hpp"

namespace ipt {

// Projected screen on the z = 0 plane, centered on the world origin.
struct ScreenGeometry {
  int width_px = 0;
  int height_px = 0;
  double ratio_x = 0;  // meters per pixel
  double ratio_y = 0;

  double world_width() const { return width_px * ratio_x; }
  double world_height() const { return height_px * ratio_y; }

  // Continuous screen pixel (edge coordinates) of a world point on z = 0.
  Eigen::Vector2d world_to_screen_px(const Eigen::Vector2d& w) const {
    return {w.x() / ratio_x + width_px / 2.0, height_px / 2.0 - w.y() / ratio_y};
  }
};

// Projector-light occluder, fixed on the screen plane.
struct ShadowSpec {
  std::vector<Eigen::Vector2d> polygon_world;  // meters on z = 0
  double attenuation = 1.0;                    // 0 = fully dark
};

struct TimedPose {
  double t = 0;
  Pose pose;  // CAMERA_TO_WORLD
};

// Scripted capture: trajectory plus channel corruption knobs. Ground-truth
// poses are the trajectory itself.
struct CaptureScenario {
  CameraIntrinsics intrinsics;
  ScreenGeometry screen;
  std::vector<TimedPose> trajectory;
  double camera_fps = 120.0;
  double noise_sigma = 0.0;  // L* units on the 0..255 scale
  std::optional<ShadowSpec> shadow;
  uint64_t seed = 0;

  void validate() const;
  static CaptureScenario load(const std::filesystem::path& json_path);
  void save(const std::filesystem::path& json_path) const;
};

struct CaptureResult {
  std::vector<ImagePlane> frames;        // SRGB8 camera frames
  std::vector<TimedPose> ground_truth;   // aligned with frames
};

// What a pinhole camera at `pose` sees of the screen frame lying on z = 0:
// per-pixel ray/plane intersection (an exact homography) with bilinear
// sampling, black outside the screen extents. Throws PipelineError when the
// optical axis does not hit the plane from above.
ImagePlane render_view(const ImagePlane& screen_frame, const ScreenGeometry& geometry,
                       const CameraIntrinsics& intr, const Pose& camera_to_world);

// Integer-pixel translation with replicated border; |dx|,|dy| <= 32.
ImagePlane apply_motion(const ImagePlane& frame, int dx, int dy);

// I.i.d. Gaussian noise on the L* channel, clamped; deterministic per seed.
ImagePlane apply_noise(const ImagePlane& frame, double sigma, uint64_t seed);

// Multiplies L* by `attenuation` inside the polygon (pixel coordinates,
// even-odd fill at pixel centers).
ImagePlane apply_shadow(const ImagePlane& frame,
                        const std::vector<Eigen::Vector2d>& polygon_px,
                        double attenuation);

// Renders camera frame k from modulated frame k (looping when the modulated
// stream is shorter) at trajectory pose k, applying shadow on the screen
// side and sensor noise per frame. RNG streams derive from (seed, k).
CaptureResult simulate_capture(const CaptureScenario& scenario,
                               const std::vector<ImagePlane>& modulated);

// CSV `t,x,y,z,qw,qx,qy,qz` (camera-to-world quaternion).
void write_ground_truth_csv(const std::filesystem::path& path,
                            const std::vector<TimedPose>& poses);
std::vector<TimedPose> read_ground_truth_csv(const std::filesystem::path& path);

}  // namespace ipt
