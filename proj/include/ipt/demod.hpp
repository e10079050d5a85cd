#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ipt/align.hpp"
#include "ipt/detector.hpp"
#include "ipt/tag_map.hpp"

namespace ipt {

struct DemodConfig {
  AlignmentConfig align;
  int mean_kernel = 3;
  int open_kernel = 3;
  int close_kernel = 5;  // larger, to reconnect tag borders
  DetectorConfig detector;

  void validate() const;
};

// Alg-2 output record: one decoded tag with image and world corners in
// matching order.
struct DetectionResult {
  int id = -1;
  int hamming = 0;
  std::array<Eigen::Vector2d, 4> image_corners;  // pixels
  std::array<Eigen::Vector3d, 4> world_corners;  // meters, z = 0
};

struct FrameDetections {
  bool ready = false;  // false while the state is only primed
  std::pair<int, int> shift{0, 0};
  std::vector<DetectionResult> detections;
};

// normalization -> mean filter -> median threshold -> OPEN -> CLOSE.
ImagePlane demod_preprocess(const ImagePlane& diff, const DemodConfig& cfg);

ImagePlane invert_binary(const ImagePlane& bin);

// Reflects a normalized difference image about the zero-difference level:
// clamp(128 + d) -> clamp(128 - d). The median threshold keeps only the
// positive flicker side, so the full pipeline runs on both reflections.
ImagePlane negate_normalized(const ImagePlane& diff);

// Recovers tags from successive camera frames: lightness extraction, shift
// alignment, subtraction, preprocessing, then tag detection on both signal
// polarities. Holds the previous frame's lightness plane; single-owner.
class Demodulator {
 public:
  Demodulator(TagMapConfig map, DemodConfig config = {});

  // Feed the next camera frame. The first call primes the state and returns
  // ready = false with no detections.
  FrameDetections process(const ImagePlane& srgb_frame);

  void reset() { prev_lightness_.reset(); }
  const TagMapConfig& map() const { return map_; }
  const DemodConfig& config() const { return config_; }

 private:
  TagMapConfig map_;
  DemodConfig config_;
  TagDetector detector_;
  std::optional<ImagePlane> prev_lightness_;
};

}  // namespace ipt
