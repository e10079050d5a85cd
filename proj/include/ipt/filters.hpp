#pragma once

#include "ipt/image.hpp"

namespace ipt {

enum class MorphOp { OPEN, CLOSE };

// Box average with replicated border; kernel must be odd, kernel=1 is the
// identity. Rounds to nearest.
ImagePlane mean_filter(const ImagePlane& img, int kernel);

// pixel > t -> 255, else 0.
ImagePlane threshold_binary(const ImagePlane& img, uint8_t t);

// OPEN = erode then dilate, CLOSE = dilate then erode; square structuring
// element of odd side `kernel`, replicated border. BINARY in, BINARY out.
ImagePlane morphology(const ImagePlane& img, MorphOp op, int kernel);

// Lower median of the pixel multiset. Throws ParamError on an empty image.
uint8_t median(const ImagePlane& img);

}  // namespace ipt
