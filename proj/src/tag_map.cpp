#include "ipt/tag_map.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ipt {

namespace {

// Uniform gap between tags and map edge along one axis, in pixels.
double gap(int extent, int count, int side) {
  return (extent - static_cast<double>(count) * side) / (count + 1);
}

void validate(const TagMapConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1 || cfg.tag_side < cfg.family.bitmap_cells()) {
    throw ConfigError("tag map: bad grid/tag dimensions");
  }
  if (cfg.tag_count() > static_cast<int>(cfg.family.codes.size())) {
    throw ConfigError("tag map: " + std::to_string(cfg.tag_count()) +
                      " tags exceed family size " +
                      std::to_string(cfg.family.codes.size()));
  }
  if (gap(cfg.map_width, cfg.cols, cfg.tag_side) < 0 ||
      gap(cfg.map_height, cfg.rows, cfg.tag_side) < 0) {
    throw ConfigError("tag map: tags do not fit inside the map bounds");
  }
  if (cfg.ratio_x <= 0 || cfg.ratio_y <= 0) {
    throw ConfigError("tag map: ratios must be positive");
  }
}

}  // namespace

std::array<int, 2> TagMapConfig::tag_origin_px(int id) const {
  if (id < 0 || id >= tag_count()) {
    throw ParamError("tag map: id " + std::to_string(id) + " not placed");
  }
  const int row = id / cols;  // row 0 = bottom
  const int col = id % cols;
  const double gx = gap(map_width, cols, tag_side);
  const double gy = gap(map_height, rows, tag_side);
  const int x0 = static_cast<int>(std::lround(gx * (col + 1) + static_cast<double>(tag_side) * col));
  const double bottom = map_height - (gy * (row + 1) + static_cast<double>(tag_side) * row);
  const int y0 = static_cast<int>(std::lround(bottom)) - tag_side;
  return {x0, y0};
}

TagMapImage generate_map(const TagMapConfig& config) {
  validate(config);
  TagMapImage out;
  out.image = ImagePlane::binary(config.map_width, config.map_height);
  std::fill(out.image.u8().begin(), out.image.u8().end(), uint8_t{255});
  out.mask.assign(out.image.sample_count(), 0);

  const int cells = config.family.bitmap_cells();
  const int cell_px = config.tag_side / cells;
  if (cell_px * cells != config.tag_side) {
    throw ConfigError("tag map: tag_side must be a multiple of " + std::to_string(cells));
  }
  for (int id = 0; id < config.tag_count(); ++id) {
    const ImagePlane tag = render_tag(config.family, id, cell_px);
    const auto [x0, y0] = config.tag_origin_px(id);
    for (int y = 0; y < tag.height(); ++y) {
      for (int x = 0; x < tag.width(); ++x) {
        const uint8_t v = tag.at_u8(x, y);
        out.image.at_u8(x0 + x, y0 + y) = v;
        out.mask[static_cast<size_t>(y0 + y) * config.map_width + (x0 + x)] =
            v == 255 ? int8_t{1} : int8_t{-1};
      }
    }
  }
  return out;
}

std::array<Eigen::Vector3d, 4> lookup_world_corners(int id, const TagMapConfig& config) {
  validate(config);
  const auto [x0, y0] = config.tag_origin_px(id);
  const double s = config.tag_side;
  auto world = [&](double px, double py) {
    return Eigen::Vector3d((px - config.map_width / 2.0) * config.ratio_x,
                           (config.map_height / 2.0 - py) * config.ratio_y, 0.0);
  };
  // Counter-clockwise in the world frame, starting bottom-left.
  return {world(x0, y0 + s), world(x0 + s, y0 + s), world(x0 + s, y0), world(x0, y0)};
}

ImagePlane mask_to_plane(const TagMapImage& map) {
  ImagePlane plane = ImagePlane::gray_u8(map.width(), map.height());
  auto dst = plane.u8();
  for (size_t i = 0; i < map.mask.size(); ++i) {
    dst[i] = map.mask[i] > 0 ? 255 : (map.mask[i] < 0 ? 0 : 128);
  }
  return plane;
}

std::vector<int8_t> mask_from_plane(const ImagePlane& plane) {
  if (plane.channels() != 1 || !plane.is_u8()) {
    throw ShapeError("mask_from_plane: single-channel u8 plane required");
  }
  std::vector<int8_t> mask(plane.sample_count());
  auto src = plane.u8();
  for (size_t i = 0; i < mask.size(); ++i) {
    if (src[i] == 255) {
      mask[i] = 1;
    } else if (src[i] == 0) {
      mask[i] = -1;
    } else if (src[i] == 128) {
      mask[i] = 0;
    } else {
      throw ShapeError("mask_from_plane: sample " + std::to_string(src[i]) +
                       " is not one of 0/128/255");
    }
  }
  return mask;
}

TagMapConfig TagMapConfig::load(const std::filesystem::path& json_path,
                                const std::filesystem::path& family_search_dir) {
  std::ifstream in(json_path);
  if (!in) throw ConfigError("tag map config: cannot open " + json_path.string());
  nlohmann::json j;
  in >> j;
  TagMapConfig cfg;
  cfg.rows = j.value("rows", cfg.rows);
  cfg.cols = j.value("cols", cfg.cols);
  cfg.map_width = j.value("map_width", cfg.map_width);
  cfg.map_height = j.value("map_height", cfg.map_height);
  cfg.tag_side = j.value("tag_side", cfg.tag_side);
  cfg.ratio_x = j.value("ratio_x", cfg.ratio_x);
  cfg.ratio_y = j.value("ratio_y", cfg.ratio_y);
  const std::string fam = j.at("family").get<std::string>();
  std::filesystem::path fam_path(fam);
  if (fam_path.is_relative()) {
    const auto beside = json_path.parent_path() / fam_path;
    if (std::filesystem::exists(beside)) {
      fam_path = beside;
    } else if (!family_search_dir.empty()) {
      fam_path = family_search_dir / fam_path;
    }
  }
  cfg.family = load_family(fam_path);
  validate(cfg);
  return cfg;
}

void TagMapConfig::save(const std::filesystem::path& json_path,
                        const std::string& family_file) const {
  nlohmann::json j{{"rows", rows},
                   {"cols", cols},
                   {"map_width", map_width},
                   {"map_height", map_height},
                   {"tag_side", tag_side},
                   {"ratio_x", ratio_x},
                   {"ratio_y", ratio_y},
                   {"family", family_file}};
  std::ofstream out(json_path);
  if (!out) throw PipelineError("tag map config: cannot write " + json_path.string());
  out << j.dump(2) << '\n';
}

}  // namespace ipt
