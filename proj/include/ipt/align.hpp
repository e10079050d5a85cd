#pragma once

#include <utility>

#include "ipt/image.hpp"

namespace ipt {

// Sample-based shift search parameters.
struct AlignmentConfig {
  int max_shift = 5;   // b: largest |m| searched
  int n_samples = 3;   // sampled columns/rows per axis
  // Off by default: divide each candidate cost by its overlap length. The
  // literal search leaves the two branch ranges un-normalized.
  bool normalize_by_overlap = false;

  void validate() const;
};

// Inter-frame translation estimate. Vertical shift from N equally spaced
// columns, horizontal from N rows; candidate costs are L1 distances over the
// shifted overlap. Ties break toward smaller |m|, then toward negative.
// Returns (m_x, m_y) such that now(x + m_x, y + m_y) ~ prev(x, y).
std::pair<int, int> estimate_shift(const ImagePlane& prev, const ImagePlane& now,
                                   const AlignmentConfig& cfg);

// Difference of the shifted overlap, mapped to u8 as clamp(128 + diff); the
// border band uncovered by the shift is filled with 128 (zero difference).
ImagePlane align_subtract(const ImagePlane& prev, const ImagePlane& now,
                          std::pair<int, int> shift);

}  // namespace ipt
