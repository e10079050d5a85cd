#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "ipt/image.hpp"

namespace ipt {

// Square-grid tag codebook (tag36h11 by default: 36 data bits, 6x6 grid,
// 1-cell black border, min pairwise hamming 11 under rotation).
//
// Code packing: bit (data_bits-1 - (r*grid + c)) holds data cell (r, c) in
// reading order of the rendered bitmap (row 0 on top), 1 = white. The
// detector samples cells in the same order.
struct TagFamily {
  std::string name;
  int data_bits = 0;
  int grid = 0;    // data cells per side
  int border = 1;  // black border cells around the data grid
  int min_hamming = 0;
  std::vector<uint64_t> codes;

  int bitmap_cells() const { return grid + 2 * border; }

  // Code as seen after rotating the rendered tag 90 degrees clockwise.
  uint64_t rotate90(uint64_t code) const;

  static TagFamily parse(std::istream& in, const std::string& origin);
};

// Codebook file: header `family=<name> bits=<n> hamming=<h>`, then one hex
// code per line. Throws ConfigError on malformed input or duplicate codes.
TagFamily load_family(const std::filesystem::path& path);

// Render one tag: black border ring plus data cells, `cell` pixels per cell.
ImagePlane render_tag(const TagFamily& family, int id, int cell);

}  // namespace ipt
