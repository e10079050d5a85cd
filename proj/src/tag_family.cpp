#include "ipt/tag_family.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace ipt {

uint64_t TagFamily::rotate90(uint64_t code) const {
  // Rotating the bitmap clockwise sends data cell (r, c) to
  // (c, grid-1-r); read the source cell that lands on each target.
  uint64_t out = 0;
  for (int r = 0; r < grid; ++r) {
    for (int c = 0; c < grid; ++c) {
      const int src_r = grid - 1 - c;
      const int src_c = r;
      const int src_bit = data_bits - 1 - (src_r * grid + src_c);
      if (code >> src_bit & 1) {
        out |= uint64_t{1} << (data_bits - 1 - (r * grid + c));
      }
    }
  }
  return out;
}

TagFamily TagFamily::parse(std::istream& in, const std::string& origin) {
  TagFamily fam;
  std::string header;
  if (!std::getline(in, header)) {
    throw ConfigError("codebook " + origin + ": empty file");
  }
  std::istringstream hs(header);
  std::string tok;
  int bits = 0, hamming = -1;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("codebook " + origin + ": bad header token '" + tok + "'");
    }
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "family") {
      fam.name = val;
    } else if (key == "bits") {
      bits = std::stoi(val);
    } else if (key == "hamming") {
      hamming = std::stoi(val);
    } else {
      throw ConfigError("codebook " + origin + ": unknown header key '" + key + "'");
    }
  }
  if (fam.name.empty() || bits <= 0 || hamming < 0) {
    throw ConfigError("codebook " + origin + ": header must set family, bits, hamming");
  }
  int grid = 0;
  while (grid * grid < bits) ++grid;
  if (grid * grid != bits || bits > 64) {
    throw ConfigError("codebook " + origin + ": bits must be a square <= 64");
  }
  fam.data_bits = bits;
  fam.grid = grid;
  fam.min_hamming = hamming;

  std::unordered_set<uint64_t> seen;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    uint64_t code = 0;
    try {
      size_t pos = 0;
      code = std::stoull(line, &pos, 16);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos != line.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("codebook " + origin + ":" + std::to_string(lineno) +
                        ": bad code line '" + line + "'");
    }
    if (bits < 64 && code >> bits != 0) {
      throw ConfigError("codebook " + origin + ":" + std::to_string(lineno) +
                        ": code wider than " + std::to_string(bits) + " bits");
    }
    if (!seen.insert(code).second) {
      throw ConfigError("codebook " + origin + ":" + std::to_string(lineno) +
                        ": duplicate code");
    }
    fam.codes.push_back(code);
  }
  if (fam.codes.empty()) {
    throw ConfigError("codebook " + origin + ": no codes");
  }
  return fam;
}

TagFamily load_family(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("codebook: cannot open " + path.string());
  return TagFamily::parse(in, path.filename().string());
}

ImagePlane render_tag(const TagFamily& family, int id, int cell) {
  if (id < 0 || id >= static_cast<int>(family.codes.size())) {
    throw ParamError("render_tag: id " + std::to_string(id) + " out of range");
  }
  if (cell < 1) throw ParamError("render_tag: cell size must be >= 1");
  const int cells = family.bitmap_cells();
  const int side = cells * cell;
  const uint64_t code = family.codes[id];
  ImagePlane img = ImagePlane::binary(side, side);
  for (int cy = 0; cy < cells; ++cy) {
    for (int cx = 0; cx < cells; ++cx) {
      uint8_t value = 0;  // border ring stays black
      const int r = cy - family.border;
      const int c = cx - family.border;
      if (r >= 0 && r < family.grid && c >= 0 && c < family.grid) {
        const int bit = family.data_bits - 1 - (r * family.grid + c);
        value = (code >> bit & 1) ? 255 : 0;
      }
      for (int py = cy * cell; py < (cy + 1) * cell; ++py) {
        for (int px = cx * cell; px < (cx + 1) * cell; ++px) {
          img.at_u8(px, py) = value;
        }
      }
    }
  }
  return img;
}

}  // namespace ipt
