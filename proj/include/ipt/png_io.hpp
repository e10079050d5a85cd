#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipt/image.hpp"

namespace ipt {

// Lossless PNG. SRGB8 planes map to 8-bit RGB, GRAY_U8/BINARY to 8-bit gray.
void write_png(const std::filesystem::path& path, const ImagePlane& img);
ImagePlane read_png(const std::filesystem::path& path,
                    ColorSpace gray_as = ColorSpace::GRAY_U8);

// Frame-sequence directory: zero-padded numbered PNGs plus manifest.json.
struct FrameManifest {
  double fps = 0.0;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  ColorSpace color_space = ColorSpace::SRGB8;

  static FrameManifest load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;
};

std::filesystem::path frame_path(const std::filesystem::path& dir, int index);

void write_frame_sequence(const std::filesystem::path& dir,
                          const std::vector<ImagePlane>& frames, double fps);
std::vector<ImagePlane> read_frame_sequence(const std::filesystem::path& dir,
                                            FrameManifest* manifest = nullptr);

}  // namespace ipt
