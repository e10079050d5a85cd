#include <doctest.h>

#include "ipt/align.hpp"
#include "ipt/channel_sim.hpp"
#include "test_support.hpp"

using namespace ipt;

namespace {

// Exhaustive full-image joint L1 search; the oracle the sampled method must
// match on pure translations.
std::pair<int, int> exhaustive_shift(const ImagePlane& prev, const ImagePlane& now, int b) {
  const int w = prev.width(), h = prev.height();
  uint64_t best_cost = UINT64_MAX;
  std::pair<int, int> best{0, 0};
  auto order = [](int bound) {
    std::vector<int> v{0};
    for (int m = 1; m <= bound; ++m) {
      v.push_back(-m);
      v.push_back(m);
    }
    return v;
  };
  for (int my : order(b)) {
    for (int mx : order(b)) {
      uint64_t cost = 0;
      const int x0 = std::max(0, -mx), x1 = std::min(w, w - mx);
      const int y0 = std::max(0, -my), y1 = std::min(h, h - my);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          cost += static_cast<uint64_t>(
              std::abs(static_cast<int>(prev.at_u8(x, y)) -
                       static_cast<int>(now.at_u8(x + mx, y + my))));
        }
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = {mx, my};
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("estimate_shift") {
  const AlignmentConfig cfg;

  SUBCASE("identical frames give (0, 0)") {
    const ImagePlane img = ipt::test::textured_gray(120, 90, 42);
    CHECK(estimate_shift(img, img, cfg) == std::pair{0, 0});
  }

  SUBCASE("planted vertical shift") {
    const ImagePlane prev = ipt::test::textured_gray(160, 120, 7);
    const ImagePlane now = apply_motion(prev, 0, 3);
    CHECK(estimate_shift(prev, now, cfg) == std::pair{0, 3});
  }

  SUBCASE("planted diagonal shift matches the exhaustive oracle") {
    const ImagePlane prev = ipt::test::textured_gray(160, 120, 11);
    const ImagePlane now = apply_motion(prev, -2, 4);
    const auto sampled = estimate_shift(prev, now, cfg);
    const auto oracle = exhaustive_shift(prev, now, cfg.max_shift);
    CHECK(sampled == std::pair{-2, 4});
    CHECK(oracle == std::pair{-2, 4});
  }

  SUBCASE("all planted shifts up to b on random textures") {
    for (uint32_t seed : {101u, 202u, 303u}) {
      const ImagePlane prev = ipt::test::textured_gray(200, 150, seed);
      for (int my = -5; my <= 5; my += 2) {
        for (int mx = -5; mx <= 5; mx += 2) {
          const ImagePlane now = apply_motion(prev, mx, my);
          CHECK(estimate_shift(prev, now, cfg) == std::pair{mx, my});
        }
      }
    }
  }

  SUBCASE("image smaller than the window is rejected") {
    const ImagePlane tiny = ipt::test::textured_gray(8, 8, 1);
    CHECK_THROWS_AS(estimate_shift(tiny, tiny, cfg), ParamError);
  }
}

TEST_CASE("align_subtract") {
  SUBCASE("equal frames at zero shift give constant 128") {
    const ImagePlane img = ipt::test::textured_gray(64, 48, 9);
    const ImagePlane out = align_subtract(img, img, {0, 0});
    for (uint8_t v : out.u8()) CHECK(v == 128);
  }

  SUBCASE("border band is exactly 128") {
    const ImagePlane prev = ipt::test::textured_gray(64, 48, 10);
    const ImagePlane now = ipt::test::textured_gray(64, 48, 20);
    const ImagePlane out = align_subtract(prev, now, {0, 3});
    for (int y = 45; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) CHECK(static_cast<int>(out.at_u8(x, y)) == 128);
    }
    // Interior rows mostly differ from 128 (independent textures).
    int non128 = 0;
    for (int y = 0; y < 45; ++y) {
      for (int x = 0; x < 64; ++x) non128 += out.at_u8(x, y) != 128;
    }
    CHECK(non128 > 64 * 45 / 2);
  }

  SUBCASE("planted shift cancels the scene exactly") {
    const ImagePlane prev = ipt::test::textured_gray(80, 60, 31);
    const ImagePlane now = apply_motion(prev, 2, -1);
    const ImagePlane out = align_subtract(prev, now, {2, -1});
    for (uint8_t v : out.u8()) CHECK(v == 128);
  }

  SUBCASE("pure flicker shows up as symmetric bimodal values") {
    ImagePlane prev = ImagePlane::gray_u8(32, 32);
    ImagePlane now = ImagePlane::gray_u8(32, 32);
    std::fill(prev.u8().begin(), prev.u8().end(), uint8_t{100});
    std::fill(now.u8().begin(), now.u8().end(), uint8_t{100});
    // Tag cells at +/- 2*delta.
    for (int x = 4; x < 12; ++x) {
      prev.at_u8(x, 10) = 104;
      now.at_u8(x, 10) = 96;  // white cell, opposite phases
      prev.at_u8(x, 20) = 96;
      now.at_u8(x, 20) = 104;  // black cell
    }
    const ImagePlane out = align_subtract(prev, now, {0, 0});
    for (int x = 4; x < 12; ++x) {
      CHECK(static_cast<int>(out.at_u8(x, 10)) == 120);  // 128 - 8
      CHECK(static_cast<int>(out.at_u8(x, 20)) == 136);  // 128 + 8
    }
    CHECK(static_cast<int>(out.at_u8(0, 0)) == 128);
  }
}
