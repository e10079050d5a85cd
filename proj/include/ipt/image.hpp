#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipt/error.hpp"

namespace ipt {

enum class ColorSpace : uint8_t {
  SRGB8,    // 3-channel gamma-encoded sRGB, uint8
  LAB_F32,  // 3-channel CIELAB, float32; L* scale carried by the producer
  GRAY_U8,  // single channel, uint8
  BINARY,   // single channel, uint8, samples in {0, 255}
};

const char* to_string(ColorSpace cs);

// Row-major raster with an explicit color-space tag. SRGB8/GRAY_U8/BINARY
// store uint8 samples, LAB_F32 stores float32; exactly one buffer is active.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int width, int height, int channels, ColorSpace space);

  static ImagePlane srgb8(int width, int height);
  static ImagePlane lab_f32(int width, int height);
  static ImagePlane gray_u8(int width, int height);
  static ImagePlane binary(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ColorSpace space() const { return space_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  size_t sample_count() const {
    return static_cast<size_t>(width_) * height_ * channels_;
  }
  bool is_u8() const { return space_ != ColorSpace::LAB_F32; }

  std::span<uint8_t> u8() { return {u8_.data(), u8_.size()}; }
  std::span<const uint8_t> u8() const { return {u8_.data(), u8_.size()}; }
  std::span<float> f32() { return {f32_.data(), f32_.size()}; }
  std::span<const float> f32() const { return {f32_.data(), f32_.size()}; }

  uint8_t& at_u8(int x, int y, int c = 0) {
    return u8_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  uint8_t at_u8(int x, int y, int c = 0) const {
    return u8_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  float& at_f32(int x, int y, int c = 0) {
    return f32_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  float at_f32(int x, int y, int c = 0) const {
    return f32_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  const uint8_t* row_u8(int y) const {
    return u8_.data() + static_cast<size_t>(y) * width_ * channels_;
  }
  uint8_t* row_u8(int y) {
    return u8_.data() + static_cast<size_t>(y) * width_ * channels_;
  }

  // Throws ShapeError unless the plane matches the expected space (and
  // for BINARY, unless every sample is 0 or 255 — callers rely on it).
  void require(ColorSpace expected, const char* op) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  ColorSpace space_ = ColorSpace::GRAY_U8;
  std::vector<uint8_t> u8_;
  std::vector<float> f32_;
};

// Bilinear resize for SRGB8 and GRAY_U8 planes.
ImagePlane resize_bilinear(const ImagePlane& src, int out_width, int out_height);

}  // namespace ipt
