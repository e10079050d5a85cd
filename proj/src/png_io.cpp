#include "ipt/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

namespace ipt {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

ColorSpace space_from_string(const std::string& s) {
  if (s == "SRGB8") return ColorSpace::SRGB8;
  if (s == "GRAY_U8") return ColorSpace::GRAY_U8;
  if (s == "BINARY") return ColorSpace::BINARY;
  if (s == "LAB_F32") return ColorSpace::LAB_F32;
  throw ConfigError("manifest: unknown color_space '" + s + "'");
}

}  // namespace

void write_png(const std::filesystem::path& path, const ImagePlane& img) {
  if (!img.is_u8() || img.empty()) {
    throw ShapeError("write_png: non-empty SRGB8/GRAY_U8/BINARY plane required");
  }
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw PipelineError("write_png: cannot open " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw PipelineError("write_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw PipelineError("write_png: libpng error on " + path.string());
  }
  png_init_io(png, fp.get());
  const int color_type = img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, img.width(), img.height(), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(img.row_u8(y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImagePlane read_png(const std::filesystem::path& path, ColorSpace gray_as) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw PipelineError("read_png: cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PipelineError("read_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PipelineError("read_png: libpng error on " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize to 8-bit gray or RGB.
  png_set_strip_16(png);
  png_set_packing(png);
  const png_byte ct = png_get_color_type(png, info);
  if (ct == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (ct == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (ct & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int ch = static_cast<int>(png_get_channels(png, info));
  ImagePlane img = ch == 3 ? ImagePlane::srgb8(w, h)
                           : ImagePlane(w, h, 1, gray_as);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, img.row_u8(y), nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

FrameManifest FrameManifest::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("manifest: cannot open " + (dir / "manifest.json").string());
  nlohmann::json j;
  in >> j;
  FrameManifest m;
  m.fps = j.at("fps").get<double>();
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  m.frame_count = j.at("frame_count").get<int>();
  m.color_space = space_from_string(j.at("color_space").get<std::string>());
  return m;
}

void FrameManifest::save(const std::filesystem::path& dir) const {
  nlohmann::json j{{"fps", fps},
                   {"width", width},
                   {"height", height},
                   {"frame_count", frame_count},
                   {"color_space", to_string(color_space)}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw PipelineError("manifest: cannot write to " + dir.string());
  out << j.dump(2) << '\n';
}

std::filesystem::path frame_path(const std::filesystem::path& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06d.png", index);
  return dir / name;
}

void write_frame_sequence(const std::filesystem::path& dir,
                          const std::vector<ImagePlane>& frames, double fps) {
  if (frames.empty()) throw ParamError("write_frame_sequence: no frames");
  std::filesystem::create_directories(dir);
  FrameManifest m;
  m.fps = fps;
  m.width = frames.front().width();
  m.height = frames.front().height();
  m.frame_count = static_cast<int>(frames.size());
  m.color_space = frames.front().space();
  for (size_t i = 0; i < frames.size(); ++i) {
    write_png(frame_path(dir, static_cast<int>(i)), frames[i]);
  }
  m.save(dir);
}

std::vector<ImagePlane> read_frame_sequence(const std::filesystem::path& dir,
                                            FrameManifest* manifest) {
  const FrameManifest m = FrameManifest::load(dir);
  if (manifest) *manifest = m;
  std::vector<ImagePlane> frames;
  frames.reserve(m.frame_count);
  for (int i = 0; i < m.frame_count; ++i) {
    frames.push_back(read_png(frame_path(dir, i),
                              m.color_space == ColorSpace::BINARY ? ColorSpace::BINARY
                                                                  : ColorSpace::GRAY_U8));
  }
  return frames;
}

}  // namespace ipt
