#include "ipt/detector.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace ipt {

namespace {

struct Component {
  std::vector<Eigen::Vector2d> boundary;  // pixel centers with an outside 4-neighbor
  int64_t area = 0;
  bool touches_border = false;
};

// 4-connected labeling of dark (0) pixels via scanline flood fill.
std::vector<Component> label_dark_components(const ImagePlane& bin, double min_area) {
  const int w = bin.width(), h = bin.height();
  const auto img = bin.u8();
  std::vector<int32_t> label(static_cast<size_t>(w) * h, -1);
  std::vector<Component> comps;
  std::vector<int> stack;

  auto dark = [&](int x, int y) { return img[static_cast<size_t>(y) * w + x] == 0; };

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const size_t si = static_cast<size_t>(sy) * w + sx;
      if (!dark(sx, sy) || label[si] >= 0) continue;
      const int id = static_cast<int>(comps.size());
      comps.emplace_back();
      Component& comp = comps.back();
      stack.push_back(static_cast<int>(si));
      label[si] = id;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w, y = idx / w;
        ++comp.area;
        bool edge = false;
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) {
            comp.touches_border = true;
            continue;
          }
          const size_t ni = static_cast<size_t>(ny[k]) * w + nx[k];
          if (!dark(nx[k], ny[k])) {
            edge = true;
          } else if (label[ni] < 0) {
            label[ni] = id;
            stack.push_back(static_cast<int>(ni));
          }
        }
        if (edge) comp.boundary.emplace_back(x, y);
      }
    }
  }
  std::erase_if(comps, [&](const Component& c) {
    return c.touches_border || c.area < min_area || c.boundary.size() < 4;
  });
  return comps;
}

// Andrew monotone chain; returns the hull counter-clockwise in y-down
// coordinates (negative shoelace).
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) >= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) >= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double tri_area2(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const Eigen::Vector2d& c) {
  return std::abs((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

// Largest-area quadrilateral with vertices on the hull: scan diagonals,
// picking the farthest point on each side. O(h^2).
std::array<Eigen::Vector2d, 4> max_area_quad(const std::vector<Eigen::Vector2d>& hull) {
  const size_t n = hull.size();
  double best = -1;
  std::array<size_t, 4> idx{0, 1, 2, 3 % n};
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double best_a = 0, best_b = 0;
      size_t ka = i, kb = i;
      for (size_t k = i + 1; k < j; ++k) {
        const double a = tri_area2(hull[i], hull[j], hull[k]);
        if (a > best_a) {
          best_a = a;
          ka = k;
        }
      }
      for (size_t k = j + 1; k < i + n; ++k) {
        const double a = tri_area2(hull[i], hull[j], hull[k % n]);
        if (a > best_b) {
          best_b = a;
          kb = k % n;
        }
      }
      if (best_a > 0 && best_b > 0 && best_a + best_b > best) {
        best = best_a + best_b;
        idx = {i, ka, j, kb};
      }
    }
  }
  return {hull[idx[0]], hull[idx[1]], hull[idx[2]], hull[idx[3]]};
}

struct Line {
  Eigen::Vector2d point;
  Eigen::Vector2d dir;  // unit
};

std::optional<Eigen::Vector2d> intersect(const Line& a, const Line& b) {
  const double det = a.dir.x() * b.dir.y() - a.dir.y() * b.dir.x();
  if (std::abs(det) < 1e-9) return std::nullopt;
  const Eigen::Vector2d d = b.point - a.point;
  const double t = (d.x() * b.dir.y() - d.y() * b.dir.x()) / det;
  return a.point + t * a.dir;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-12) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double quad_area(const std::array<Eigen::Vector2d, 4>& c) {
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    const auto& a = c[i];
    const auto& b = c[(i + 1) % 4];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;  // signed; negative = CCW on screen here
}

bool is_convex(const std::array<Eigen::Vector2d, 4>& c) {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d u = c[(i + 1) % 4] - c[i];
    const Eigen::Vector2d v = c[(i + 2) % 4] - c[(i + 1) % 4];
    const double cr = u.x() * v.y() - u.y() * v.x();
    if (std::abs(cr) < 1e-12) return false;
    const int s = cr > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return true;
}

// Total-least-squares line through boundary points assigned to one side,
// pushed outward by the expected half-pixel rasterization inset.
std::optional<Line> fit_edge(const std::vector<Eigen::Vector2d>& pts,
                             const Eigen::Vector2d& centroid) {
  if (pts.size() < 2) return std::nullopt;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector2d d = p - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d dir = eig.eigenvectors().col(1).normalized();
  Eigen::Vector2d normal(-dir.y(), dir.x());
  if (normal.dot(mean - centroid) < 0) normal = -normal;
  // Boundary cell centers of a rasterized half-plane sit inside the true
  // edge by max(|nx|, |ny|)/2 on average.
  const double inset = std::max(std::abs(normal.x()), std::abs(normal.y())) * 0.5;
  return Line{mean + inset * normal, dir};
}

}  // namespace

TagDetector::TagDetector(TagFamily family, DetectorConfig config)
    : family_(std::move(family)), config_(config) {
  if (family_.codes.empty()) throw ParamError("detector: empty tag family");
}

std::vector<Quad> TagDetector::find_quads(const ImagePlane& bin) const {
  bin.require(ColorSpace::BINARY, "find_quads");
  std::vector<Quad> quads;
  for (const Component& comp : label_dark_components(bin, config_.min_area)) {
    const std::vector<Eigen::Vector2d> hull = convex_hull(comp.boundary);
    if (hull.size() < 4) continue;
    std::array<Eigen::Vector2d, 4> rough = max_area_quad(hull);

    // A real tag outline fills most of its hull quad; stringy blobs do not.
    const double rough_area = std::abs(quad_area(rough));
    if (rough_area < config_.min_area ||
        static_cast<double>(comp.area) < 0.25 * rough_area) {
      continue;
    }

    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& c : rough) centroid += c;
    centroid /= 4.0;

    // Assign boundary points to the nearest side, keeping clear of corners.
    std::array<std::vector<Eigen::Vector2d>, 4> side_pts;
    for (const Eigen::Vector2d& p : comp.boundary) {
      bool near_corner = false;
      for (const auto& c : rough) {
        if ((p - c).norm() < config_.corner_exclusion) {
          near_corner = true;
          break;
        }
      }
      if (near_corner) continue;
      double best = config_.fit_distance;
      int best_side = -1;
      for (int s = 0; s < 4; ++s) {
        const double d = point_segment_distance(p, rough[s], rough[(s + 1) % 4]);
        if (d < best) {
          best = d;
          best_side = s;
        }
      }
      if (best_side >= 0) side_pts[best_side].push_back(p);
    }

    std::array<Eigen::Vector2d, 4> corners = rough;
    std::array<std::optional<Line>, 4> lines;
    bool all_lines = true;
    for (int s = 0; s < 4; ++s) {
      lines[s] = fit_edge(side_pts[s], centroid);
      all_lines = all_lines && lines[s].has_value();
    }
    if (all_lines) {
      bool ok = true;
      for (int s = 0; s < 4; ++s) {
        // Side s-1 and side s meet at corner s.
        const auto p = intersect(*lines[(s + 3) % 4], *lines[s]);
        if (!p || !p->allFinite()) {
          ok = false;
          break;
        }
        corners[s] = *p;
      }
      if (!ok) corners = rough;
    }

    if (!is_convex(corners)) continue;
    double area = quad_area(corners);
    if (area > 0) {  // normalize winding to CCW-on-screen
      std::swap(corners[1], corners[3]);
      area = -area;
    }
    if (-area < config_.min_area) continue;
    quads.push_back(Quad{corners, -area});
  }
  return quads;
}

std::optional<Detection> TagDetector::decode_quad(const ImagePlane& bin,
                                                  const Quad& quad) const {
  if (bin.channels() != 1 || !bin.is_u8()) {
    throw ShapeError("decode_quad: single-channel binary image required");
  }
  const int cells = family_.bitmap_cells();
  const double c = cells;
  // Canonical bitmap coordinates, y down: corner 0 = bottom-left (0, c).
  const std::array<Eigen::Vector2d, 4> canon{
      Eigen::Vector2d{0, c}, {c, c}, {c, 0}, {0, 0}};

  // Exact 4-point homography canon -> image (h33 = 1).
  Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> rhs;
  for (int i = 0; i < 4; ++i) {
    const double x = canon[i].x(), y = canon[i].y();
    const double u = quad.corners[i].x(), v = quad.corners[i].y();
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    rhs(2 * i) = u;
    rhs(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> hv = a.colPivHouseholderQr().solve(rhs);
  if (!hv.allFinite()) return std::nullopt;  // degenerate corner set
  Eigen::Matrix3d hm;
  hm << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), 1.0;

  auto sample = [&](double cx, double cy) -> int {
    const Eigen::Vector3d q = hm * Eigen::Vector3d(cx, cy, 1.0);
    if (std::abs(q.z()) < 1e-12) return -1;
    const int px = static_cast<int>(std::lround(q.x() / q.z()));
    const int py = static_cast<int>(std::lround(q.y() / q.z()));
    if (px < 0 || py < 0 || px >= bin.width() || py >= bin.height()) return -1;
    return bin.at_u8(px, py) == 255 ? 1 : 0;
  };

  // The border ring must be mostly dark or this is not a tag outline.
  int ring = 0, ring_dark = 0;
  for (int i = 0; i < cells; ++i) {
    const std::array<std::pair<double, double>, 4> probes{
        std::pair{i + 0.5, 0.5}, {i + 0.5, c - 0.5}, {0.5, i + 0.5}, {c - 0.5, i + 0.5}};
    for (const auto& [cx, cy] : probes) {
      const int s = sample(cx, cy);
      if (s < 0) return std::nullopt;
      ++ring;
      ring_dark += s == 0 ? 1 : 0;
    }
  }
  if (ring_dark * 5 < ring * 4) return std::nullopt;  // < 80% dark

  uint64_t code = 0;
  for (int r = 0; r < family_.grid; ++r) {
    for (int col = 0; col < family_.grid; ++col) {
      const int s = sample(family_.border + col + 0.5, family_.border + r + 0.5);
      if (s < 0) return std::nullopt;
      code = code << 1 | static_cast<uint64_t>(s);
    }
  }

  // Try the sampled code under 4 rotations against every family code.
  std::array<uint64_t, 4> rotated{code, 0, 0, 0};
  for (int r = 1; r < 4; ++r) rotated[r] = family_.rotate90(rotated[r - 1]);
  int best_ham = family_.data_bits + 1, best_id = -1, best_rot = 0;
  for (size_t id = 0; id < family_.codes.size(); ++id) {
    for (int r = 0; r < 4; ++r) {
      const int ham = std::popcount(rotated[r] ^ family_.codes[id]);
      if (ham < best_ham) {
        best_ham = ham;
        best_id = static_cast<int>(id);
        best_rot = r;
      }
    }
  }
  if (best_id < 0 || best_ham > config_.max_correction) return std::nullopt;

  // rotated[r] matching means the physical tag is rotated r * 90 deg CW in
  // the image relative to the assumed orientation; shift the corner cycle so
  // corners[k] lands on canonical corner k.
  Detection det;
  det.id = best_id;
  det.hamming = best_ham;
  det.decision_margin = static_cast<double>(family_.data_bits - best_ham);
  for (int k = 0; k < 4; ++k) {
    det.corners[k] = quad.corners[(k + best_rot) % 4];
  }
  return det;
}

std::vector<Detection> TagDetector::detect_tags(const ImagePlane& bin) const {
  std::map<int, Detection> by_id;
  for (const Quad& quad : find_quads(bin)) {
    const auto det = decode_quad(bin, quad);
    if (!det) continue;
    auto it = by_id.find(det->id);
    if (it == by_id.end() || det->hamming < it->second.hamming) {
      by_id[det->id] = *det;
    }
  }
  std::vector<Detection> out;
  out.reserve(by_id.size());
  for (auto& [id, det] : by_id) out.push_back(det);
  return out;
}

}  // namespace ipt
