#pragma once

#include <cstddef>
#include <cstdint>

namespace ipt::kernels {

// Flat pixel kernels behind the image operations. Every entry has a scalar
// reference implementation and, on x86-64 with AVX2, a vector variant that
// produces bit-identical output (equivalence-tested). Selection happens once
// at first use; IPT_FORCE_SCALAR=1 pins the scalar table.
struct Ops {
  // Interleaved sRGB -> L* on the 0..255 scale, rounded to nearest.
  void (*srgb_to_l_u8)(const uint8_t* rgb, size_t pixels, uint8_t* out);

  // out = clamp(128 + (now - prev), 0, 255)
  void (*sub_normalize_u8)(const uint8_t* prev, const uint8_t* now, size_t n,
                           uint8_t* out);

  // Sum of absolute differences.
  uint64_t (*sad_u8)(const uint8_t* a, const uint8_t* b, size_t n);

  // out = in > t ? 255 : 0
  void (*threshold_u8)(const uint8_t* in, size_t n, uint8_t t, uint8_t* out);

  // Sliding min/max along a row, window 2*radius+1, replicated border.
  void (*row_min_u8)(const uint8_t* in, int w, int radius, uint8_t* out);
  void (*row_max_u8)(const uint8_t* in, int w, int radius, uint8_t* out);

  // Vertical min/max over full image, window 2*radius+1, replicated border.
  void (*col_min_u8)(const uint8_t* in, int w, int h, int radius, uint8_t* out);
  void (*col_max_u8)(const uint8_t* in, int w, int h, int radius, uint8_t* out);

  // 3x3 box mean with replicated border, rounded to nearest.
  void (*box3x3_u8)(const uint8_t* in, int w, int h, uint8_t* out);

  // out = clamp(l + delta * mask, 0, 255); mask samples are {-1, 0, +1}.
  void (*offset_lightness_f32)(const float* l, const int8_t* mask, float delta,
                               size_t n, float* out);
};

const Ops& scalar_ops();
// nullptr when the build or the CPU lacks AVX2.
const Ops* avx2_ops();

const Ops& active();
const char* active_name();

}  // namespace ipt::kernels
