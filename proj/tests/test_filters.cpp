#include <doctest.h>

#include <numeric>

#include "ipt/filters.hpp"
#include "test_support.hpp"

using namespace ipt;

namespace {

ImagePlane from_rows(const std::vector<std::vector<int>>& rows, ColorSpace space) {
  ImagePlane img(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), 1, space);
  for (size_t y = 0; y < rows.size(); ++y) {
    for (size_t x = 0; x < rows[y].size(); ++x) {
      img.at_u8(static_cast<int>(x), static_cast<int>(y)) = static_cast<uint8_t>(rows[y][x]);
    }
  }
  return img;
}

}  // namespace

TEST_CASE("mean_filter") {
  SUBCASE("constant image unchanged for any kernel") {
    ImagePlane img = ImagePlane::gray_u8(9, 7);
    std::fill(img.u8().begin(), img.u8().end(), uint8_t{77});
    for (int k : {1, 3, 5, 7}) {
      const ImagePlane out = mean_filter(img, k);
      for (uint8_t v : out.u8()) CHECK(v == 77);
    }
  }
  SUBCASE("kernel 1 is the identity") {
    const ImagePlane img = ipt::test::random_gray(23, 17, 5);
    const ImagePlane out = mean_filter(img, 1);
    CHECK(std::equal(img.u8().begin(), img.u8().end(), out.u8().begin()));
  }
  SUBCASE("hand-computed 3x3 box sum") {
    const ImagePlane img = from_rows({{0, 0, 0}, {0, 9, 0}, {0, 0, 0}}, ColorSpace::GRAY_U8);
    const ImagePlane out = mean_filter(img, 3);
    CHECK(static_cast<int>(out.at_u8(1, 1)) == 1);
  }
  SUBCASE("even kernel rejected") {
    CHECK_THROWS_AS(mean_filter(ImagePlane::gray_u8(4, 4), 2), ParamError);
  }
  SUBCASE("generic kernel matches brute force") {
    const ImagePlane img = ipt::test::random_gray(31, 19, 99);
    const ImagePlane out = mean_filter(img, 5);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        int sum = 0;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) {
            sum += img.at_u8(std::clamp(x + dx, 0, img.width() - 1),
                             std::clamp(y + dy, 0, img.height() - 1));
          }
        }
        CHECK(static_cast<int>(out.at_u8(x, y)) == (sum + 12) / 25);
      }
    }
  }
}

TEST_CASE("threshold_binary") {
  SUBCASE("all zero stays zero at t=0") {
    const ImagePlane img = ImagePlane::gray_u8(8, 8);
    const ImagePlane out = threshold_binary(img, 0);
    for (uint8_t v : out.u8()) CHECK(v == 0);
  }
  SUBCASE("ramp splits exactly above t") {
    ImagePlane img = ImagePlane::gray_u8(256, 1);
    for (int x = 0; x < 256; ++x) img.at_u8(x, 0) = static_cast<uint8_t>(x);
    const ImagePlane out = threshold_binary(img, 127);
    for (int x = 0; x < 256; ++x) {
      CHECK(static_cast<int>(out.at_u8(x, 0)) == (x > 127 ? 255 : 0));
    }
  }
  SUBCASE("bimodal image splits at its median") {
    ImagePlane img = ImagePlane::gray_u8(10, 10);
    for (int i = 0; i < 100; ++i) img.u8()[i] = i < 50 ? 10 : 200;
    const uint8_t t = median(img);
    CHECK(static_cast<int>(t) == 10);  // lower median of the 10/200 split
    const ImagePlane out = threshold_binary(img, t);
    for (int i = 0; i < 100; ++i) CHECK(static_cast<int>(out.u8()[i]) == (i < 50 ? 0 : 255));
  }
  SUBCASE("output only holds 0 and 255") {
    const ImagePlane out = threshold_binary(ipt::test::random_gray(33, 21, 3), 131);
    for (uint8_t v : out.u8()) CHECK((v == 0 || v == 255));
  }
}

TEST_CASE("median") {
  SUBCASE("constant image") {
    ImagePlane img = ImagePlane::gray_u8(5, 5);
    std::fill(img.u8().begin(), img.u8().end(), uint8_t{42});
    CHECK(static_cast<int>(median(img)) == 42);
  }
  SUBCASE("lower median tie rule") {
    ImagePlane img = ImagePlane::gray_u8(4, 1);
    img.u8()[0] = 1;
    img.u8()[1] = 2;
    img.u8()[2] = 3;
    img.u8()[3] = 4;
    CHECK(static_cast<int>(median(img)) == 2);
  }
  SUBCASE("matches a full-sort oracle on random images") {
    for (uint32_t seed : {11u, 22u, 33u}) {
      const ImagePlane img = ipt::test::random_gray(10, 10, seed);
      std::vector<uint8_t> sorted(img.u8().begin(), img.u8().end());
      std::sort(sorted.begin(), sorted.end());
      CHECK(median(img) == sorted[(sorted.size() - 1) / 2]);
    }
  }
  SUBCASE("empty image rejected") {
    CHECK_THROWS_AS(median(ImagePlane::gray_u8(0, 0)), ParamError);
  }
}

TEST_CASE("morphology") {
  SUBCASE("all-white unchanged under both ops") {
    ImagePlane img = ImagePlane::binary(12, 9);
    std::fill(img.u8().begin(), img.u8().end(), uint8_t{255});
    for (MorphOp op : {MorphOp::OPEN, MorphOp::CLOSE}) {
      const ImagePlane out = morphology(img, op, 3);
      for (uint8_t v : out.u8()) CHECK(v == 255);
    }
  }
  SUBCASE("isolated pixel removed by OPEN") {
    ImagePlane img = ImagePlane::binary(9, 9);
    img.at_u8(4, 4) = 255;
    const ImagePlane out = morphology(img, MorphOp::OPEN, 3);
    for (uint8_t v : out.u8()) CHECK(v == 0);
  }
  SUBCASE("CLOSE bridges a 1-px gap between blocks") {
    // Two 3x8 white blocks with a one-column gap at x=4.
    ImagePlane img = ImagePlane::binary(8, 8);
    for (int y = 0; y < 8; ++y) {
      for (int x = 1; x <= 3; ++x) img.at_u8(x, y) = 255;
      for (int x = 5; x <= 7; ++x) img.at_u8(x, y) = 255;
    }
    const ImagePlane out = morphology(img, MorphOp::CLOSE, 3);
    for (int y = 0; y < 8; ++y) CHECK(static_cast<int>(out.at_u8(4, y)) == 255);
  }
  SUBCASE("idempotence") {
    const ImagePlane noise = threshold_binary(ipt::test::random_gray(40, 30, 77), 128);
    for (MorphOp op : {MorphOp::OPEN, MorphOp::CLOSE}) {
      const ImagePlane once = morphology(noise, op, 3);
      const ImagePlane twice = morphology(once, op, 3);
      CHECK(std::equal(once.u8().begin(), once.u8().end(), twice.u8().begin()));
    }
  }
  SUBCASE("non-binary input rejected") {
    ImagePlane gray = ImagePlane::gray_u8(4, 4);
    gray.at_u8(1, 1) = 7;
    CHECK_THROWS_AS(morphology(gray, MorphOp::OPEN, 3), ShapeError);
  }
}

TEST_CASE("mean preservation on constant images") {
  ImagePlane img = ImagePlane::gray_u8(17, 13);
  std::fill(img.u8().begin(), img.u8().end(), uint8_t{201});
  const ImagePlane out = mean_filter(img, 5);
  const double mean_in = 201.0;
  const double mean_out =
      std::accumulate(out.u8().begin(), out.u8().end(), 0.0) / out.sample_count();
  CHECK(mean_out == doctest::Approx(mean_in));
}
