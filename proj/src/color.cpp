#include "ipt/color.hpp"

#include <algorithm>
#include <cmath>

#include "ipt/kernels.hpp"

namespace ipt {

namespace {

// sRGB <-> XYZ under D65, the usual 7-digit matrices.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kXyzToRgb[3][3] = {
    {3.2404542, -1.5371385, -0.4985314},
    {-0.9692660, 1.8760108, 0.0415560},
    {0.0556434, -0.2040259, 1.0572252},
};
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.00000;
constexpr double kWhiteZ = 1.08883;
constexpr double kLabEps = 216.0 / 24389.0;
constexpr double kLabKappa = 24389.0 / 27.0;

double srgb_decode_cont(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// Byte inputs only ever see 256 distinct values.
const double* srgb_decode_lut() {
  static const double* lut = [] {
    static double table[256];
    for (int v = 0; v < 256; ++v) table[v] = srgb_decode_cont(v / 255.0);
    return table;
  }();
  return lut;
}

double srgb_decode(uint8_t v) { return srgb_decode_lut()[v]; }

// round(encode(x) * 255) is monotone in x; precomputing the 255 linear-domain
// cut points turns the per-pixel pow into a binary search.
uint8_t srgb_encode_byte(double linear) {
  static const double* cuts = [] {
    static double table[255];
    for (int k = 0; k < 255; ++k) table[k] = srgb_decode_cont((k + 0.5) / 255.0);
    return table;
  }();
  if (linear <= 0.0) return 0;
  if (linear >= 1.0) return 255;
  return static_cast<uint8_t>(std::upper_bound(cuts, cuts + 255, linear) - cuts);
}

double lab_f(double t) {
  return t > kLabEps ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double ft) {
  const double t3 = ft * ft * ft;
  return t3 > kLabEps ? t3 : (116.0 * ft - 16.0) / kLabKappa;
}

}  // namespace

ImagePlane rgb_to_lab(const ImagePlane& img, LabScale scale) {
  img.require(ColorSpace::SRGB8, "rgb_to_lab");
  ImagePlane out = ImagePlane::lab_f32(img.width(), img.height());
  const uint8_t* src = img.u8().data();
  float* dst = out.f32().data();
  const size_t px = static_cast<size_t>(img.width()) * img.height();
  const double ls = scale == LabScale::Byte ? 2.55 : 1.0;
  for (size_t i = 0; i < px; ++i) {
    const double rl = srgb_decode(src[3 * i]);
    const double gl = srgb_decode(src[3 * i + 1]);
    const double bl = srgb_decode(src[3 * i + 2]);
    const double x = kRgbToXyz[0][0] * rl + kRgbToXyz[0][1] * gl + kRgbToXyz[0][2] * bl;
    const double y = kRgbToXyz[1][0] * rl + kRgbToXyz[1][1] * gl + kRgbToXyz[1][2] * bl;
    const double z = kRgbToXyz[2][0] * rl + kRgbToXyz[2][1] * gl + kRgbToXyz[2][2] * bl;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    dst[3 * i] = static_cast<float>((116.0 * fy - 16.0) * ls);
    dst[3 * i + 1] = static_cast<float>(500.0 * (fx - fy));
    dst[3 * i + 2] = static_cast<float>(200.0 * (fy - fz));
  }
  return out;
}

ImagePlane lab_to_rgb(const ImagePlane& img, LabScale scale) {
  img.require(ColorSpace::LAB_F32, "lab_to_rgb");
  ImagePlane out = ImagePlane::srgb8(img.width(), img.height());
  const float* src = img.f32().data();
  uint8_t* dst = out.u8().data();
  const size_t px = static_cast<size_t>(img.width()) * img.height();
  const double ls = scale == LabScale::Byte ? 1.0 / 2.55 : 1.0;
  for (size_t i = 0; i < px; ++i) {
    const double l = src[3 * i] * ls;
    const double a = src[3 * i + 1];
    const double b = src[3 * i + 2];
    const double fy = (l + 16.0) / 116.0;
    const double fx = fy + a / 500.0;
    const double fz = fy - b / 200.0;
    const double x = lab_f_inv(fx) * kWhiteX;
    const double yv = lab_f_inv(fy) * kWhiteY;
    const double z = lab_f_inv(fz) * kWhiteZ;
    const double rl = kXyzToRgb[0][0] * x + kXyzToRgb[0][1] * yv + kXyzToRgb[0][2] * z;
    const double gl = kXyzToRgb[1][0] * x + kXyzToRgb[1][1] * yv + kXyzToRgb[1][2] * z;
    const double bl = kXyzToRgb[2][0] * x + kXyzToRgb[2][1] * yv + kXyzToRgb[2][2] * z;
    dst[3 * i] = srgb_encode_byte(rl);
    dst[3 * i + 1] = srgb_encode_byte(gl);
    dst[3 * i + 2] = srgb_encode_byte(bl);
  }
  return out;
}

ImagePlane srgb_lightness_u8(const ImagePlane& img) {
  img.require(ColorSpace::SRGB8, "srgb_lightness_u8");
  ImagePlane out = ImagePlane::gray_u8(img.width(), img.height());
  kernels::active().srgb_to_l_u8(img.u8().data(),
                                 static_cast<size_t>(img.width()) * img.height(),
                                 out.u8().data());
  return out;
}

}  // namespace ipt
