#pragma once

#include "ipt/image.hpp"

namespace ipt {

// L* channel scaling carried by a LAB_F32 plane.
enum class LabScale {
  Native,  // L* in [0, 100]
  Byte,    // L* in [0, 255] (Alg-style clamp arithmetic)
};

// sRGB (gamma-encoded, D65) -> CIELAB. a*/b* keep their native range in
// either scaling. Throws ShapeError on non-3-channel input.
ImagePlane rgb_to_lab(const ImagePlane& img, LabScale scale = LabScale::Native);

// Inverse conversion; out-of-gamut values clamp per channel.
ImagePlane lab_to_rgb(const ImagePlane& img, LabScale scale = LabScale::Native);

// Fused sRGB -> L* on the 0..255 scale, rounded to u8 (demodulation path;
// SIMD-dispatched).
ImagePlane srgb_lightness_u8(const ImagePlane& img);

}  // namespace ipt
