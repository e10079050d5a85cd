#include "ipt/filters.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "ipt/kernels.hpp"

namespace ipt {

namespace {

void require_gray(const ImagePlane& img, const char* op) {
  if (img.channels() != 1 || !img.is_u8()) {
    throw ShapeError(std::string(op) + ": single-channel u8 input required");
  }
}

// Generic odd-kernel box mean, replicate border, integer rounding.
ImagePlane box_mean_generic(const ImagePlane& img, int k) {
  const int w = img.width(), h = img.height();
  const int r = k / 2;
  const int n = k * k;
  ImagePlane out = ImagePlane::gray_u8(w, h);
  // Row pass into u32 sums, then column pass.
  std::vector<uint32_t> rowsum(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const uint8_t* row = img.row_u8(y);
    uint32_t s = 0;
    for (int i = -r; i <= r; ++i) s += row[std::clamp(i, 0, w - 1)];
    rowsum[static_cast<size_t>(y) * w] = s;
    for (int x = 1; x < w; ++x) {
      s += row[std::clamp(x + r, 0, w - 1)];
      s -= row[std::clamp(x - r - 1, 0, w - 1)];
      rowsum[static_cast<size_t>(y) * w + x] = s;
    }
  }
  for (int x = 0; x < w; ++x) {
    uint32_t s = 0;
    for (int i = -r; i <= r; ++i) s += rowsum[static_cast<size_t>(std::clamp(i, 0, h - 1)) * w + x];
    out.at_u8(x, 0) = static_cast<uint8_t>((s + n / 2) / n);
    for (int y = 1; y < h; ++y) {
      s += rowsum[static_cast<size_t>(std::clamp(y + r, 0, h - 1)) * w + x];
      s -= rowsum[static_cast<size_t>(std::clamp(y - r - 1, 0, h - 1)) * w + x];
      out.at_u8(x, y) = static_cast<uint8_t>((s + n / 2) / n);
    }
  }
  return out;
}

ImagePlane erode(const ImagePlane& img, int k) {
  const int w = img.width(), h = img.height();
  const int r = k / 2;
  const auto& ops = kernels::active();
  ImagePlane tmp = ImagePlane::binary(w, h);
  for (int y = 0; y < h; ++y) ops.row_min_u8(img.row_u8(y), w, r, tmp.row_u8(y));
  ImagePlane out = ImagePlane::binary(w, h);
  ops.col_min_u8(tmp.u8().data(), w, h, r, out.u8().data());
  return out;
}

ImagePlane dilate(const ImagePlane& img, int k) {
  const int w = img.width(), h = img.height();
  const int r = k / 2;
  const auto& ops = kernels::active();
  ImagePlane tmp = ImagePlane::binary(w, h);
  for (int y = 0; y < h; ++y) ops.row_max_u8(img.row_u8(y), w, r, tmp.row_u8(y));
  ImagePlane out = ImagePlane::binary(w, h);
  ops.col_max_u8(tmp.u8().data(), w, h, r, out.u8().data());
  return out;
}

}  // namespace

ImagePlane mean_filter(const ImagePlane& img, int kernel) {
  require_gray(img, "mean_filter");
  if (kernel < 1 || kernel % 2 == 0) {
    throw ParamError("mean_filter: kernel must be odd and >= 1, got " +
                     std::to_string(kernel));
  }
  if (kernel == 1 || img.empty()) {
    ImagePlane out = img;
    return out;
  }
  if (kernel == 3) {
    ImagePlane out = ImagePlane::gray_u8(img.width(), img.height());
    kernels::active().box3x3_u8(img.u8().data(), img.width(), img.height(),
                                out.u8().data());
    return out;
  }
  return box_mean_generic(img, kernel);
}

ImagePlane threshold_binary(const ImagePlane& img, uint8_t t) {
  require_gray(img, "threshold_binary");
  ImagePlane out = ImagePlane::binary(img.width(), img.height());
  kernels::active().threshold_u8(img.u8().data(), img.sample_count(), t,
                                 out.u8().data());
  return out;
}

ImagePlane morphology(const ImagePlane& img, MorphOp op, int kernel) {
  img.require(ColorSpace::BINARY, "morphology");
  if (kernel < 1 || kernel % 2 == 0) {
    throw ParamError("morphology: kernel must be odd and >= 1");
  }
  if (kernel == 1 || img.empty()) return img;
  if (op == MorphOp::OPEN) return dilate(erode(img, kernel), kernel);
  return erode(dilate(img, kernel), kernel);
}

uint8_t median(const ImagePlane& img) {
  require_gray(img, "median");
  if (img.empty()) throw ParamError("median: empty image");
  std::array<size_t, 256> hist{};
  for (uint8_t v : img.u8()) ++hist[v];
  // Lower median: element at index floor((n-1)/2) of the sorted multiset.
  const size_t target = (img.sample_count() - 1) / 2;
  size_t seen = 0;
  for (int v = 0; v < 256; ++v) {
    seen += hist[v];
    if (seen > target) return static_cast<uint8_t>(v);
  }
  return 255;
}

}  // namespace ipt
