#include <doctest.h>

#include "ipt/color.hpp"
#include "test_support.hpp"

using namespace ipt;

namespace {

ImagePlane single_pixel(uint8_t r, uint8_t g, uint8_t b) {
  ImagePlane img = ImagePlane::srgb8(1, 1);
  img.at_u8(0, 0, 0) = r;
  img.at_u8(0, 0, 1) = g;
  img.at_u8(0, 0, 2) = b;
  return img;
}

}  // namespace

TEST_CASE("rgb_to_lab reference values") {
  SUBCASE("white maps to L*=100, a*=b*=0") {
    const ImagePlane lab = rgb_to_lab(single_pixel(255, 255, 255));
    CHECK(lab.at_f32(0, 0, 0) == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(std::abs(lab.at_f32(0, 0, 1)) < 0.01);
    CHECK(std::abs(lab.at_f32(0, 0, 2)) < 0.01);
  }
  SUBCASE("black maps to zero") {
    const ImagePlane lab = rgb_to_lab(single_pixel(0, 0, 0));
    CHECK(lab.at_f32(0, 0, 0) == doctest::Approx(0.0));
    CHECK(lab.at_f32(0, 0, 1) == doctest::Approx(0.0));
    CHECK(lab.at_f32(0, 0, 2) == doctest::Approx(0.0));
  }
  SUBCASE("pure red, D65 double-precision reference") {
    const ImagePlane lab = rgb_to_lab(single_pixel(255, 0, 0));
    CHECK(lab.at_f32(0, 0, 0) == doctest::Approx(53.2408).epsilon(0.001));
    CHECK(lab.at_f32(0, 0, 1) == doctest::Approx(80.0925).epsilon(0.001));
    CHECK(lab.at_f32(0, 0, 2) == doctest::Approx(67.2032).epsilon(0.001));
  }
  SUBCASE("byte scale multiplies L* by 2.55") {
    const ImagePlane lab = rgb_to_lab(single_pixel(255, 255, 255), LabScale::Byte);
    CHECK(lab.at_f32(0, 0, 0) == doctest::Approx(255.0).epsilon(1e-4));
  }
  SUBCASE("wrong channel count is a shape error") {
    CHECK_THROWS_AS(rgb_to_lab(ImagePlane::gray_u8(4, 4)), ShapeError);
  }
}

TEST_CASE("lab_to_rgb inverts rgb_to_lab") {
  SUBCASE("white and black map back exactly") {
    ImagePlane lab = ImagePlane::lab_f32(1, 1);
    lab.at_f32(0, 0, 0) = 100.0f;
    ImagePlane rgb = lab_to_rgb(lab);
    CHECK(static_cast<int>(rgb.at_u8(0, 0, 0)) == 255);
    CHECK(static_cast<int>(rgb.at_u8(0, 0, 1)) == 255);
    CHECK(static_cast<int>(rgb.at_u8(0, 0, 2)) == 255);
    lab.at_f32(0, 0, 0) = 0.0f;
    rgb = lab_to_rgb(lab);
    CHECK(static_cast<int>(rgb.at_u8(0, 0, 0)) == 0);
    CHECK(static_cast<int>(rgb.at_u8(0, 0, 1)) == 0);
    CHECK(static_cast<int>(rgb.at_u8(0, 0, 2)) == 0);
  }

  SUBCASE("round trip over a 16x16x16 color lattice stays within +/-1") {
    ImagePlane img = ImagePlane::srgb8(64, 64);  // 4096 lattice colors
    int i = 0;
    for (int r = 0; r < 16; ++r) {
      for (int g = 0; g < 16; ++g) {
        for (int b = 0; b < 16; ++b, ++i) {
          img.u8()[3 * i] = static_cast<uint8_t>(r * 17);
          img.u8()[3 * i + 1] = static_cast<uint8_t>(g * 17);
          img.u8()[3 * i + 2] = static_cast<uint8_t>(b * 17);
        }
      }
    }
    for (const LabScale scale : {LabScale::Native, LabScale::Byte}) {
      const ImagePlane back = lab_to_rgb(rgb_to_lab(img, scale), scale);
      int max_err = 0;
      for (size_t k = 0; k < img.sample_count(); ++k) {
        max_err = std::max(max_err, std::abs(static_cast<int>(img.u8()[k]) -
                                             static_cast<int>(back.u8()[k])));
      }
      CHECK(max_err <= 1);
    }
  }

  SUBCASE("out-of-gamut clamps instead of throwing") {
    ImagePlane lab = ImagePlane::lab_f32(1, 1);
    lab.at_f32(0, 0, 0) = 80.0f;
    lab.at_f32(0, 0, 1) = 120.0f;  // far outside sRGB
    lab.at_f32(0, 0, 2) = -120.0f;
    CHECK_NOTHROW(lab_to_rgb(lab));
  }
}

TEST_CASE("srgb_lightness_u8 matches the double-precision converter") {
  const ImagePlane img = ipt::test::random_srgb(97, 41, 123);
  const ImagePlane fast = srgb_lightness_u8(img);
  const ImagePlane lab = rgb_to_lab(img, LabScale::Byte);
  int max_err = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int ref = static_cast<int>(std::lround(lab.at_f32(x, y, 0)));
      max_err = std::max(max_err, std::abs(ref - static_cast<int>(fast.at_u8(x, y))));
    }
  }
  CHECK(max_err <= 1);  // float32 kernel vs double reference
}
