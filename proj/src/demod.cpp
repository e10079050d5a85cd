#include "ipt/demod.hpp"

#include <map>

#include "ipt/color.hpp"
#include "ipt/filters.hpp"

namespace ipt {

void DemodConfig::validate() const {
  align.validate();
  auto odd = [](int k, const char* name) {
    if (k < 1 || k % 2 == 0) {
      throw ParamError(std::string("demod: ") + name + " kernel must be odd and >= 1");
    }
  };
  odd(mean_kernel, "mean");
  odd(open_kernel, "open");
  odd(close_kernel, "close");
}

ImagePlane demod_preprocess(const ImagePlane& diff, const DemodConfig& cfg) {
  cfg.validate();
  const ImagePlane smoothed = mean_filter(diff, cfg.mean_kernel);
  ImagePlane bin = threshold_binary(smoothed, median(smoothed));
  bin = morphology(bin, MorphOp::OPEN, cfg.open_kernel);
  return morphology(bin, MorphOp::CLOSE, cfg.close_kernel);
}

ImagePlane invert_binary(const ImagePlane& bin) {
  bin.require(ColorSpace::BINARY, "invert_binary");
  ImagePlane out = bin;
  for (uint8_t& v : out.u8()) v = static_cast<uint8_t>(255 - v);
  return out;
}

ImagePlane negate_normalized(const ImagePlane& diff) {
  if (diff.channels() != 1 || !diff.is_u8()) {
    throw ShapeError("negate_normalized: single-channel u8 input required");
  }
  ImagePlane out = diff;
  for (uint8_t& v : out.u8()) {
    v = v == 0 ? uint8_t{255} : static_cast<uint8_t>(256 - v);
  }
  return out;
}

Demodulator::Demodulator(TagMapConfig map, DemodConfig config)
    : map_(std::move(map)),
      config_(config),
      detector_(map_.family, config.detector) {
  config_.validate();
}

FrameDetections Demodulator::process(const ImagePlane& frame) {
  ImagePlane lightness = srgb_lightness_u8(frame);
  FrameDetections out;
  if (!prev_lightness_) {
    prev_lightness_ = std::move(lightness);
    return out;
  }
  if (prev_lightness_->width() != lightness.width() ||
      prev_lightness_->height() != lightness.height()) {
    throw ShapeError("demodulate: frame size changed mid-stream");
  }

  out.ready = true;
  out.shift = estimate_shift(*prev_lightness_, lightness, config_.align);
  const ImagePlane diff = align_subtract(*prev_lightness_, lightness, out.shift);
  prev_lightness_ = std::move(lightness);

  // The difference sign depends on which projector phase the pair straddles,
  // and the median threshold keeps only the positive side: the tag border
  // ring survives thresholding in exactly one of the two reflections. Run
  // the preprocessing on both, detect on each binary image and its inverse,
  // and keep the better decode per id.
  const ImagePlane bin_pos = demod_preprocess(diff, config_);
  const ImagePlane bin_neg = demod_preprocess(negate_normalized(diff), config_);
  const ImagePlane inv_pos = invert_binary(bin_pos);
  const ImagePlane inv_neg = invert_binary(bin_neg);
  std::map<int, Detection> merged;
  for (const ImagePlane* image : {&bin_pos, &inv_pos, &bin_neg, &inv_neg}) {
    for (const Detection& det : detector_.detect_tags(*image)) {
      auto it = merged.find(det.id);
      if (it == merged.end() || det.hamming < it->second.hamming) {
        merged[det.id] = det;
      }
    }
  }

  for (const auto& [id, det] : merged) {
    if (id >= map_.tag_count()) continue;  // decoded but not placed in the map
    DetectionResult r;
    r.id = id;
    r.hamming = det.hamming;
    r.image_corners = det.corners;
    const auto world = lookup_world_corners(id, map_);
    for (int k = 0; k < 4; ++k) r.world_corners[k] = world[k];
    out.detections.push_back(std::move(r));
  }
  return out;
}

}  // namespace ipt
