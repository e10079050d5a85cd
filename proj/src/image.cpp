#include "ipt/image.hpp"

#include <algorithm>
#include <cmath>

namespace ipt {

const char* to_string(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::SRGB8: return "SRGB8";
    case ColorSpace::LAB_F32: return "LAB_F32";
    case ColorSpace::GRAY_U8: return "GRAY_U8";
    case ColorSpace::BINARY: return "BINARY";
  }
  return "?";
}

ImagePlane::ImagePlane(int width, int height, int channels, ColorSpace space)
    : width_(width), height_(height), channels_(channels), space_(space) {
  if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
    throw ShapeError("ImagePlane: bad dimensions " + std::to_string(width) + "x" +
                     std::to_string(height) + "x" + std::to_string(channels));
  }
  const size_t n = static_cast<size_t>(width) * height * channels;
  if (space == ColorSpace::LAB_F32) {
    f32_.assign(n, 0.0f);
  } else {
    u8_.assign(n, 0);
  }
}

ImagePlane ImagePlane::srgb8(int w, int h) { return {w, h, 3, ColorSpace::SRGB8}; }
ImagePlane ImagePlane::lab_f32(int w, int h) { return {w, h, 3, ColorSpace::LAB_F32}; }
ImagePlane ImagePlane::gray_u8(int w, int h) { return {w, h, 1, ColorSpace::GRAY_U8}; }
ImagePlane ImagePlane::binary(int w, int h) { return {w, h, 1, ColorSpace::BINARY}; }

void ImagePlane::require(ColorSpace expected, const char* op) const {
  if (space_ != expected) {
    throw ShapeError(std::string(op) + ": expected " + to_string(expected) +
                     " input, got " + to_string(space_));
  }
  if (expected == ColorSpace::BINARY) {
    for (uint8_t v : u8_) {
      if (v != 0 && v != 255) {
        throw ShapeError(std::string(op) + ": BINARY plane holds sample " +
                         std::to_string(v));
      }
    }
  }
}

ImagePlane resize_bilinear(const ImagePlane& src, int out_w, int out_h) {
  if (!src.is_u8() || src.space() == ColorSpace::BINARY) {
    throw ShapeError("resize_bilinear: SRGB8 or GRAY_U8 input required");
  }
  if (out_w <= 0 || out_h <= 0) throw ParamError("resize_bilinear: bad output size");
  ImagePlane dst(out_w, out_h, src.channels(), src.space());
  if (src.empty()) return dst;

  const int ch = src.channels();
  const double sx = static_cast<double>(src.width()) / out_w;
  const double sy = static_cast<double>(src.height()) / out_h;
  for (int y = 0; y < out_h; ++y) {
    // Pixel-center mapping: dst center (y + 0.5) -> src coordinate.
    const double fy = (y + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(fy));
    const double wy = fy - y0;
    const int ya = std::clamp(y0, 0, src.height() - 1);
    const int yb = std::clamp(y0 + 1, 0, src.height() - 1);
    for (int x = 0; x < out_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const double wx = fx - x0;
      const int xa = std::clamp(x0, 0, src.width() - 1);
      const int xb = std::clamp(x0 + 1, 0, src.width() - 1);
      for (int c = 0; c < ch; ++c) {
        const double v = (1 - wy) * ((1 - wx) * src.at_u8(xa, ya, c) + wx * src.at_u8(xb, ya, c)) +
                         wy * ((1 - wx) * src.at_u8(xa, yb, c) + wx * src.at_u8(xb, yb, c));
        dst.at_u8(x, y, c) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return dst;
}

}  // namespace ipt
