#include <algorithm>
#include <cmath>

#include "ipt/kernels.hpp"
#include "kernels/lab_common.hpp"

namespace ipt::kernels {

namespace detail {

const float* srgb_linear_lut() {
  static const float* lut = [] {
    static float table[256];
    for (int v = 0; v < 256; ++v) {
      const double c = v / 255.0;
      const double lin = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
      table[v] = static_cast<float>(lin);
    }
    return table;
  }();
  return lut;
}

}  // namespace detail

namespace {

using detail::srgb_linear_lut;

void srgb_to_l_u8_scalar(const uint8_t* rgb, size_t px, uint8_t* out) {
  const float* lut = srgb_linear_lut();
  for (size_t i = 0; i < px; ++i) {
    const float l = detail::lightness_byte_f32(lut[rgb[3 * i]], lut[rgb[3 * i + 1]],
                                               lut[rgb[3 * i + 2]]);
    const float c = std::min(std::max(l, 0.0f), 255.0f);
    out[i] = static_cast<uint8_t>(std::lrintf(c));
  }
}

void sub_normalize_u8_scalar(const uint8_t* prev, const uint8_t* now, size_t n,
                             uint8_t* out) {
  for (size_t i = 0; i < n; ++i) {
    const int d = 128 + static_cast<int>(now[i]) - static_cast<int>(prev[i]);
    out[i] = static_cast<uint8_t>(std::clamp(d, 0, 255));
  }
}

uint64_t sad_u8_scalar(const uint8_t* a, const uint8_t* b, size_t n) {
  uint64_t sum = 0;
  for (size_t i = 0; i < n; ++i) {
    sum += static_cast<uint64_t>(a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
  }
  return sum;
}

void threshold_u8_scalar(const uint8_t* in, size_t n, uint8_t t, uint8_t* out) {
  for (size_t i = 0; i < n; ++i) out[i] = in[i] > t ? 255 : 0;
}

void row_min_u8_scalar(const uint8_t* in, int w, int radius, uint8_t* out) {
  for (int x = 0; x < w; ++x) {
    uint8_t m = 255;
    for (int k = -radius; k <= radius; ++k) {
      m = std::min(m, in[std::clamp(x + k, 0, w - 1)]);
    }
    out[x] = m;
  }
}

void row_max_u8_scalar(const uint8_t* in, int w, int radius, uint8_t* out) {
  for (int x = 0; x < w; ++x) {
    uint8_t m = 0;
    for (int k = -radius; k <= radius; ++k) {
      m = std::max(m, in[std::clamp(x + k, 0, w - 1)]);
    }
    out[x] = m;
  }
}

void col_min_u8_scalar(const uint8_t* in, int w, int h, int radius, uint8_t* out) {
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t m = 255;
      for (int k = -radius; k <= radius; ++k) {
        m = std::min(m, in[static_cast<size_t>(std::clamp(y + k, 0, h - 1)) * w + x]);
      }
      out[static_cast<size_t>(y) * w + x] = m;
    }
  }
}

void col_max_u8_scalar(const uint8_t* in, int w, int h, int radius, uint8_t* out) {
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t m = 0;
      for (int k = -radius; k <= radius; ++k) {
        m = std::max(m, in[static_cast<size_t>(std::clamp(y + k, 0, h - 1)) * w + x]);
      }
      out[static_cast<size_t>(y) * w + x] = m;
    }
  }
}

// (sum + 4) / 9 is exact round-to-nearest for integer sums (no .5 ties).
void box3x3_u8_scalar(const uint8_t* in, int w, int h, uint8_t* out) {
  auto px = [&](int x, int y) -> int {
    return in[static_cast<size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) sum += px(x + dx, y + dy);
      out[static_cast<size_t>(y) * w + x] = static_cast<uint8_t>((sum + 4) / 9);
    }
  }
}

void offset_lightness_f32_scalar(const float* l, const int8_t* mask, float delta,
                                 size_t n, float* out) {
  for (size_t i = 0; i < n; ++i) {
    const float v = l[i] + delta * static_cast<float>(mask[i]);
    out[i] = std::min(std::max(v, 0.0f), 255.0f);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      srgb_to_l_u8_scalar,  sub_normalize_u8_scalar, sad_u8_scalar,
      threshold_u8_scalar,  row_min_u8_scalar,       row_max_u8_scalar,
      col_min_u8_scalar,    col_max_u8_scalar,       box3x3_u8_scalar,
      offset_lightness_f32_scalar,
  };
  return ops;
}

}  // namespace ipt::kernels
