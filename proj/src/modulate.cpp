#include "ipt/modulate.hpp"

#include <cmath>

#include "ipt/color.hpp"
#include "ipt/kernels.hpp"

namespace ipt {

int ModulationConfig::frames_per_input() const {
  if (input_fps <= 0 || output_fps <= 0) {
    throw ParamError("modulation: fps values must be positive");
  }
  const double ratio = output_fps / input_fps;
  const int n = static_cast<int>(std::llround(ratio));
  if (std::abs(ratio - n) > 1e-9 || n < 2 || n % 2 != 0) {
    throw ParamError("modulation: output_fps must be an even integer multiple (>= 2) "
                     "of input_fps");
  }
  return n;
}

void ModulationConfig::validate() const {
  frames_per_input();
  if (delta_l < 0) throw ParamError("modulation: delta_l must be >= 0");
  if (out_width <= 0 || out_height <= 0) {
    throw ParamError("modulation: output size must be positive");
  }
  if (mask.size() != static_cast<size_t>(out_width) * out_height) {
    throw ShapeError("modulation: mask size does not match output dimensions");
  }
}

namespace {

ImagePlane resize_to_output(const ImagePlane& frame, const ModulationConfig& cfg) {
  frame.require(ColorSpace::SRGB8, "modulate");
  if (frame.width() == cfg.out_width && frame.height() == cfg.out_height) {
    return frame;
  }
  return resize_bilinear(frame, cfg.out_width, cfg.out_height);
}

// Quantize to the 1/256 L* grid; values <= 255 need 16 mantissa bits, so
// every later +/- delta_l and the phase mean stay exact in float32.
std::vector<float> quantized_lightness(const ImagePlane& lab) {
  const size_t px = static_cast<size_t>(lab.width()) * lab.height();
  std::vector<float> l(px);
  const float* src = lab.f32().data();
  for (size_t i = 0; i < px; ++i) {
    l[i] = std::nearbyintf(src[i * 3] * 256.0f) / 256.0f;
  }
  return l;
}

}  // namespace

LightnessPhases modulate_lightness(const ImagePlane& frame,
                                   const ModulationConfig& config, int phase) {
  config.validate();
  if (phase != 1 && phase != -1) throw ParamError("modulate: phase must be +1 or -1");
  const int n = config.frames_per_input();
  const ImagePlane resized = resize_to_output(frame, config);
  const ImagePlane lab = rgb_to_lab(resized, LabScale::Byte);

  LightnessPhases out;
  out.width = config.out_width;
  out.height = config.out_height;
  out.original = quantized_lightness(lab);
  out.phases.reserve(n);
  float delta = config.delta_l * static_cast<float>(phase);
  for (int k = 0; k < n; ++k) {
    std::vector<float> plane(out.original.size());
    kernels::active().offset_lightness_f32(out.original.data(), config.mask.data(),
                                           delta, out.original.size(), plane.data());
    out.phases.push_back(std::move(plane));
    delta = -delta;
  }
  return out;
}

std::vector<ImagePlane> modulate_frame(const ImagePlane& frame,
                                       const ModulationConfig& config, int phase) {
  config.validate();
  const ImagePlane resized = resize_to_output(frame, config);
  ImagePlane lab = rgb_to_lab(resized, LabScale::Byte);
  const std::vector<float> original = quantized_lightness(lab);

  const int n = config.frames_per_input();
  std::vector<ImagePlane> out;
  out.reserve(n);
  float* labd = lab.f32().data();
  std::vector<float> plane(original.size());
  float delta = config.delta_l * static_cast<float>(phase);
  for (int k = 0; k < n; ++k) {
    kernels::active().offset_lightness_f32(original.data(), config.mask.data(), delta,
                                           original.size(), plane.data());
    for (size_t i = 0; i < plane.size(); ++i) labd[i * 3] = plane[i];
    out.push_back(lab_to_rgb(lab, LabScale::Byte));
    delta = -delta;
  }
  return out;
}

StreamModulator::StreamModulator(ModulationConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<ImagePlane> StreamModulator::next(const ImagePlane& frame) {
  // N is even, so the sign returns to its starting value after each input
  // frame; carrying it anyway keeps the contract explicit.
  std::vector<ImagePlane> frames = modulate_frame(frame, config_, sign_);
  return frames;
}

std::vector<ImagePlane> modulate_stream(const std::vector<ImagePlane>& frames,
                                        const ModulationConfig& config) {
  if (frames.empty()) throw ParamError("modulate_stream: empty input");
  StreamModulator mod(config);
  std::vector<ImagePlane> out;
  out.reserve(frames.size() * static_cast<size_t>(config.frames_per_input()));
  for (const ImagePlane& f : frames) {
    for (ImagePlane& m : mod.next(f)) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ipt
