#include "ipt/align.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ipt/kernels.hpp"

namespace ipt {

void AlignmentConfig::validate() const {
  if (max_shift < 0) throw ParamError("alignment: max_shift must be >= 0");
  if (n_samples < 1) throw ParamError("alignment: n_samples must be >= 1");
}

namespace {

void require_gray_pair(const ImagePlane& a, const ImagePlane& b, const char* op) {
  if (a.channels() != 1 || !a.is_u8() || b.channels() != 1 || !b.is_u8()) {
    throw ShapeError(std::string(op) + ": single-channel u8 inputs required");
  }
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeError(std::string(op) + ": frame dimensions differ");
  }
}

// Candidate order 0, -1, +1, -2, +2, ... realizes the tie rule with a
// strict-improvement comparison.
int argmin_shift(int b, const std::vector<const uint8_t*>& prev_lines,
                 const std::vector<const uint8_t*>& now_lines, int len,
                 bool normalize) {
  const auto& sad = kernels::active().sad_u8;
  double best_cost = -1;
  int best_m = 0;
  for (int step = 0; step <= 2 * b; ++step) {
    const int m = step % 2 == 1 ? -(step + 1) / 2 : step / 2;
    const int overlap = len - std::abs(m);
    uint64_t cost = 0;
    for (size_t i = 0; i < prev_lines.size(); ++i) {
      if (m >= 0) {
        cost += sad(prev_lines[i], now_lines[i] + m, static_cast<size_t>(overlap));
      } else {
        cost += sad(prev_lines[i] - m, now_lines[i], static_cast<size_t>(overlap));
      }
    }
    const double c = normalize ? static_cast<double>(cost) / overlap
                               : static_cast<double>(cost);
    if (best_cost < 0 || c < best_cost) {
      best_cost = c;
      best_m = m;
    }
  }
  return best_m;
}

}  // namespace

std::pair<int, int> estimate_shift(const ImagePlane& prev, const ImagePlane& now,
                                   const AlignmentConfig& cfg) {
  cfg.validate();
  require_gray_pair(prev, now, "estimate_shift");
  const int w = prev.width(), h = prev.height();
  const int b = cfg.max_shift;
  if (h <= 2 * b || w <= 2 * b) {
    throw ParamError("estimate_shift: image smaller than the search window");
  }

  const int n = cfg.n_samples;
  // Vertical shift from sampled columns (contiguous copies so the SAD kernel
  // sees flat spans).
  std::vector<std::vector<uint8_t>> prev_cols(n), now_cols(n);
  std::vector<const uint8_t*> prev_ptr(n), now_ptr(n);
  for (int i = 0; i < n; ++i) {
    const int x = std::clamp(static_cast<int>(std::lround((i + 1) * static_cast<double>(w) /
                                                          (n + 1))),
                             0, w - 1);
    prev_cols[i].resize(h);
    now_cols[i].resize(h);
    for (int y = 0; y < h; ++y) {
      prev_cols[i][y] = prev.at_u8(x, y);
      now_cols[i][y] = now.at_u8(x, y);
    }
    prev_ptr[i] = prev_cols[i].data();
    now_ptr[i] = now_cols[i].data();
  }
  const int my = argmin_shift(b, prev_ptr, now_ptr, h, cfg.normalize_by_overlap);

  // Horizontal shift from sampled rows.
  for (int i = 0; i < n; ++i) {
    const int y = std::clamp(static_cast<int>(std::lround((i + 1) * static_cast<double>(h) /
                                                          (n + 1))),
                             0, h - 1);
    prev_ptr[i] = prev.row_u8(y);
    now_ptr[i] = now.row_u8(y);
  }
  const int mx = argmin_shift(b, prev_ptr, now_ptr, w, cfg.normalize_by_overlap);
  return {mx, my};
}

ImagePlane align_subtract(const ImagePlane& prev, const ImagePlane& now,
                          std::pair<int, int> shift) {
  require_gray_pair(prev, now, "align_subtract");
  const int w = prev.width(), h = prev.height();
  const auto [mx, my] = shift;
  if (std::abs(mx) >= w || std::abs(my) >= h) {
    throw ParamError("align_subtract: shift exceeds frame size");
  }
  ImagePlane out = ImagePlane::gray_u8(w, h);
  std::fill(out.u8().begin(), out.u8().end(), uint8_t{128});

  const int x0 = std::max(0, -mx);
  const int x1 = std::min(w, w - mx);  // prev columns with x+mx in range
  const int y0 = std::max(0, -my);
  const int y1 = std::min(h, h - my);
  const int len = x1 - x0;
  if (len <= 0) return out;
  const auto& sub = kernels::active().sub_normalize_u8;
  for (int y = y0; y < y1; ++y) {
    sub(prev.row_u8(y) + x0, now.row_u8(y + my) + x0 + mx, static_cast<size_t>(len),
        out.row_u8(y) + x0);
  }
  return out;
}

}  // namespace ipt
