#pragma once

#include <cmath>
#include <cstdint>

// Shared constants and the float32 lightness recipe used by both kernel
// tables. The scalar and AVX2 paths must execute the exact same IEEE
// operation sequence (no FMA contraction) so outputs stay bit-identical;
// both kernel TUs are compiled with -ffp-contract=off.
namespace ipt::kernels::detail {

// sRGB -> XYZ (D65), middle row only (Y / relative luminance).
inline constexpr float kYr = 0.2126729f;
inline constexpr float kYg = 0.7151522f;
inline constexpr float kYb = 0.0721750f;

// CIE f(t) breakpoint constants.
inline constexpr float kLabEps = 0.008856452f;    // (6/29)^3
inline constexpr float kLabKappa = 903.2963f;     // (29/3)^3
inline constexpr float kByteScale = 2.55f;        // L* 0..100 -> 0..255

// Gamma-decode LUT for sRGB bytes, filled once from double math.
const float* srgb_linear_lut();

// cbrt via two sqrts for the seed and four Newton steps. Only correctly
// rounded IEEE primitives (sqrt, div, mul, sub), so a lane-parallel
// transcription is bit-identical. Valid for x in (0, ~1.1]; callers handle
// the linear CIE branch below kLabEps.
inline float cbrt_newton(float x) {
  float y = std::sqrt(std::sqrt(x));  // x^(1/4), within ~33% of x^(1/3)
  const float c = 1.0f / 3.0f;
  for (int i = 0; i < 4; ++i) {
    const float yy = y * y;
    const float q = x / yy;
    y = y - (y - q) * c;
  }
  return y;
}

// L* on the 0..255 scale from linear RGB, float32 all the way.
inline float lightness_byte_f32(float rl, float gl, float bl) {
  const float y = (kYr * rl + kYg * gl) + kYb * bl;
  const float fy_cube = cbrt_newton(y);
  const float fy_lin = (kLabKappa * y + 16.0f) / 116.0f;
  const float fy = y > kLabEps ? fy_cube : fy_lin;
  const float l = 116.0f * fy - 16.0f;
  return l * kByteScale;
}

}  // namespace ipt::kernels::detail
