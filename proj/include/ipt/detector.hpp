#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <vector>

#include "ipt/image.hpp"
#include "ipt/tag_family.hpp"

namespace ipt {

// Candidate tag outline: sub-pixel corners of a dark connected component,
// ordered counter-clockwise as seen on screen (negative shoelace in pixel
// coordinates), arbitrary starting corner.
struct Quad {
  std::array<Eigen::Vector2d, 4> corners;
  double area = 0;
};

// Decoded tag. corners[k] is the image position of the tag's canonical
// corner k (counter-clockwise from bottom-left of the upright bitmap),
// matching the world-corner order of the tag map.
struct Detection {
  int id = -1;
  int hamming = 0;
  std::array<Eigen::Vector2d, 4> corners;
  double decision_margin = 0;  // data_bits - hamming
};

struct DetectorConfig {
  double min_area = 64.0;      // px^2, rejects specks that survive morphology
  int max_correction = 2;      // accepted hamming distance
  double fit_distance = 1.5;   // px, boundary-to-side assignment tolerance
  double corner_exclusion = 3.0;  // px, boundary points this close to a corner
                                  // stay out of the edge fits
};

// Connected components -> boundary tracing -> quad fitting -> homography bit
// sampling against the codebook. Operates on binarized images where tags
// appear as dark structures on a lighter background.
class TagDetector {
 public:
  explicit TagDetector(TagFamily family, DetectorConfig config = {});

  const TagFamily& family() const { return family_; }

  // Dark-component outlines with sub-pixel corners from edge line fits.
  std::vector<Quad> find_quads(const ImagePlane& bin) const;

  // Sample the quad's cells, match against the codebook under 4 rotations.
  std::optional<Detection> decode_quad(const ImagePlane& bin, const Quad& quad) const;

  // find_quads + decode_quad, deduplicated by id (lowest hamming wins),
  // sorted by id.
  std::vector<Detection> detect_tags(const ImagePlane& bin) const;

 private:
  TagFamily family_;
  DetectorConfig config_;
};

}  // namespace ipt
