#pragma once

#include <vector>

#include "ipt/image.hpp"

namespace ipt {

// Embedding parameters. delta_l lives on the 0..255 L* scale. The working
// lightness representation is float32 quantized to 1/256 steps, which makes
// the +/- delta_l arithmetic (and the phase-pair cancellation) exact.
struct ModulationConfig {
  double input_fps = 30.0;
  double output_fps = 60.0;
  float delta_l = 4.0f;
  int out_width = 0;
  int out_height = 0;
  std::vector<int8_t> mask;  // per-pixel {-1, 0, +1}, out_width x out_height

  // N = output_fps / input_fps; must be an even integer >= 2.
  int frames_per_input() const;
  void validate() const;
};

// Lightness-domain view of one modulated frame: the quantized original L*
// plane and the N phase planes, before sRGB re-encoding. This is the
// representation the anti-symmetry property is exact in.
struct LightnessPhases {
  int width = 0;
  int height = 0;
  std::vector<float> original;
  std::vector<std::vector<float>> phases;
};

LightnessPhases modulate_lightness(const ImagePlane& frame,
                                   const ModulationConfig& config, int phase = +1);

// Full embedding of one input frame: resize to out size, add the alternating
// +/- delta_l * mask offset in L*, clamp to [0, 255], re-encode to sRGB.
// `phase` (+1/-1) selects the sign applied to the first output frame.
std::vector<ImagePlane> modulate_frame(const ImagePlane& frame,
                                       const ModulationConfig& config,
                                       int phase = +1);

// Single-producer stream modulator; carries the alternating sign across
// input frames so the projected stream blinks continuously.
class StreamModulator {
 public:
  explicit StreamModulator(ModulationConfig config);

  std::vector<ImagePlane> next(const ImagePlane& frame);
  const ModulationConfig& config() const { return config_; }

 private:
  ModulationConfig config_;
  int sign_ = +1;
};

std::vector<ImagePlane> modulate_stream(const std::vector<ImagePlane>& frames,
                                        const ModulationConfig& config);

}  // namespace ipt
