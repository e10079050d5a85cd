#include <doctest.h>

#include "ipt/channel_sim.hpp"
#include "ipt/demod.hpp"
#include "ipt/modulate.hpp"
#include "test_support.hpp"

using namespace ipt;

namespace {

TagMapConfig small_map() {
  TagMapConfig cfg;
  cfg.family = ipt::test::load_tag36h11();
  cfg.rows = 3;
  cfg.cols = 3;
  cfg.map_width = 480;
  cfg.map_height = 480;
  cfg.tag_side = 96;
  cfg.ratio_x = 0.002;
  cfg.ratio_y = 0.002;
  return cfg;
}

Pose nadir(double h) {
  Pose p;
  p.convention = FrameConvention::CAMERA_TO_WORLD;
  p.rotation << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  p.translation = {0, 0, h};
  return p;
}

// Simulated static capture of the small map, n frames.
std::vector<ImagePlane> static_capture(const TagMapConfig& map, int n, double
                                       noise_sigma = 0.0, uint64_t seed = 3) {
  const TagMapImage map_img = generate_map(map);
  ModulationConfig mod;
  mod.input_fps = 60;
  mod.output_fps = 120;
  mod.delta_l = 4.0f;
  mod.out_width = map.map_width;
  mod.out_height = map.map_height;
  mod.mask = map_img.mask;
  const ImagePlane content = ipt::test::textured_srgb(map.map_width, map.map_height, 17);
  const auto modulated = modulate_frame(content, mod);

  CaptureScenario scen;
  scen.intrinsics = {640, 640, 320, 320, 640, 640};
  scen.screen = {map.map_width, map.map_height, map.ratio_x, map.ratio_y};
  scen.camera_fps = 120;
  scen.noise_sigma = noise_sigma;
  scen.seed = seed;
  for (int k = 0; k < n; ++k) scen.trajectory.push_back({k / 120.0, nadir(0.85)});
  return simulate_capture(scen, modulated).frames;
}

}  // namespace

TEST_CASE("demod_preprocess") {
  SUBCASE("constant input maps to all black") {
    ImagePlane diff = ImagePlane::gray_u8(64, 64);
    std::fill(diff.u8().begin(), diff.u8().end(), uint8_t{128});
    const ImagePlane bin = demod_preprocess(diff, DemodConfig{});
    for (uint8_t v : bin.u8()) CHECK(v == 0);
  }

  SUBCASE("salt specks are removed by OPEN") {
    ImagePlane diff = ImagePlane::gray_u8(64, 64);
    std::fill(diff.u8().begin(), diff.u8().end(), uint8_t{128});
    // A few isolated bright pixels over the 128 background.
    diff.at_u8(10, 10) = 200;
    diff.at_u8(30, 40) = 200;
    diff.at_u8(55, 20) = 200;
    DemodConfig cfg;
    cfg.mean_kernel = 1;  // keep the specks sharp until thresholding
    const ImagePlane bin = demod_preprocess(diff, cfg);
    for (uint8_t v : bin.u8()) CHECK(v == 0);
  }

  SUBCASE("synthetic tag diff keeps each tag border connected") {
    // Build the polarity image of a real map diff and check the outer border
    // of every tag survives as part of one dark component per tag.
    const TagMapConfig map = small_map();
    const auto frames = static_capture(map, 2);
    Demodulator demod(map);
    CHECK_FALSE(demod.process(frames[0]).ready);
    const FrameDetections fd = demod.process(frames[1]);
    CHECK(fd.ready);
    CHECK(fd.detections.size() == 9);
  }
}

TEST_CASE("demodulate end to end on a static capture") {
  const TagMapConfig map = small_map();
  const auto frames = static_capture(map, 4);
  Demodulator demod(map);

  SUBCASE("first frame primes, later frames detect all 9 tags") {
    const FrameDetections first = demod.process(frames[0]);
    CHECK_FALSE(first.ready);
    CHECK(first.detections.empty());
    for (size_t k = 1; k < frames.size(); ++k) {
      const FrameDetections fd = demod.process(frames[k]);
      CHECK(fd.ready);
      CHECK(fd.shift == std::pair{0, 0});
      REQUIRE(fd.detections.size() == 9);
      for (int i = 0; i < 9; ++i) {
        CHECK(fd.detections[i].id == i);
        CHECK(fd.detections[i].hamming == 0);
        for (const auto& c : fd.detections[i].image_corners) {
          CHECK(c.x() >= 0);
          CHECK(c.x() < 640);
          CHECK(c.y() >= 0);
          CHECK(c.y() < 640);
        }
        for (const auto& w : fd.detections[i].world_corners) {
          CHECK(w.z() == 0.0);
        }
      }
    }
  }
}

TEST_CASE("demodulate on identical frames returns nothing") {
  const TagMapConfig map = small_map();
  const auto frames = static_capture(map, 2);
  Demodulator demod(map);
  demod.process(frames[0]);
  const FrameDetections fd = demod.process(frames[0]);  // same frame again
  CHECK(fd.ready);
  CHECK(fd.detections.empty());
}

TEST_CASE("demodulate is deterministic") {
  const TagMapConfig map = small_map();
  const auto frames = static_capture(map, 3, 2.0);
  auto run = [&] {
    Demodulator demod(map);
    std::vector<size_t> counts;
    for (const auto& f : frames) counts.push_back(demod.process(f).detections.size());
    return counts;
  };
  CHECK(run() == run());
}

TEST_CASE("world corner lookup guards unknown ids") {
  // A map smaller than the family: detections outside the placed range must
  // never surface. Build a 1-tag map but feed the detector an image with two
  // tags (ids 0 and 50); id 50 is placed in a bigger map, not this one.
  TagMapConfig one = small_map();
  one.rows = 1;
  one.cols = 1;
  one.map_width = 200;
  one.map_height = 200;
  const TagFamily& fam = one.family;
  const int cell = 12, side = fam.bitmap_cells() * cell;
  ImagePlane img = ImagePlane::binary(2 * side + 60, side + 40);
  std::fill(img.u8().begin(), img.u8().end(), uint8_t{255});
  for (int id : {0, 50}) {
    const ImagePlane tag = render_tag(fam, id, cell);
    const int ox = 20 + (id == 50 ? side + 20 : 0);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) img.at_u8(ox + x, 20 + y) = tag.at_u8(x, y);
    }
  }
  const TagDetector det(fam);
  const auto dets = det.detect_tags(img);
  REQUIRE(dets.size() == 2);  // detector sees both
  // The demodulator-level guard: only ids present in the map may surface.
  // (Checked through the public pipeline by looking up world corners.)
  CHECK_THROWS_AS(lookup_world_corners(50, one), ParamError);
  CHECK_NOTHROW(lookup_world_corners(0, one));
}
