#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <vector>

#include "ipt/tag_family.hpp"

namespace ipt {

// Layout of the projected tag map. World frame is ENU with the origin at the
// map center, +x east (right), +y north (up in the map image), z = 0 on the
// screen plane; world = (px - map_width/2) * ratio_x horizontally, with the
// pixel y axis flipped.
struct TagMapConfig {
  int rows = 9;
  int cols = 9;
  int map_width = 1920;
  int map_height = 2160;
  int tag_side = 120;  // full bitmap side in pixels (border included)
  double ratio_x = 2.17 / 1920;  // meters per pixel
  double ratio_y = 2.47 / 2160;
  TagFamily family;

  int tag_count() const { return rows * cols; }
  double world_width() const { return map_width * ratio_x; }
  double world_height() const { return map_height * ratio_y; }

  // Top-left bitmap pixel of a placed tag; id 0 sits bottom-left, ids run
  // left-to-right then bottom-to-top.
  std::array<int, 2> tag_origin_px(int id) const;

  static TagMapConfig load(const std::filesystem::path& json_path,
                           const std::filesystem::path& family_search_dir = {});
  void save(const std::filesystem::path& json_path,
            const std::string& family_file) const;
};

// The rendered map plus its modulation mask (+1 white-in-tag, -1
// black-in-tag, 0 on the quiet zones / background).
struct TagMapImage {
  ImagePlane image;  // BINARY, white background
  std::vector<int8_t> mask;

  int width() const { return image.width(); }
  int height() const { return image.height(); }
};

TagMapImage generate_map(const TagMapConfig& config);

// ENU coordinates (meters, z = 0) of a tag's outer border corners,
// counter-clockwise from bottom-left in the world frame.
std::array<Eigen::Vector3d, 4> lookup_world_corners(int id, const TagMapConfig& config);

// Mask sidecar as an 8-bit plane: 0 -> -1, 128 -> 0, 255 -> +1.
ImagePlane mask_to_plane(const TagMapImage& map);
std::vector<int8_t> mask_from_plane(const ImagePlane& plane);

}  // namespace ipt
