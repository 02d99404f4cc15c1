#pragma once

#include <string>
#include <vector>

#include "camo/image.hpp"

namespace camo {

enum class ResampleKind { kNearest, kBilinear, kBicubic };

struct ResampleMethod {
  ResampleKind kind = ResampleKind::kBilinear;
  // Sharpness parameter of the cubic kernel family; must be finite and
  // negative. -0.5 is the Catmull-Rom member.
  double bicubic_a = -0.5;

  static ResampleMethod nearest() { return {ResampleKind::kNearest, -0.5}; }
  static ResampleMethod bilinear() { return {ResampleKind::kBilinear, -0.5}; }
  static ResampleMethod bicubic(double a = -0.5);
};

std::string to_string(const ResampleMethod& method);
ResampleMethod resample_method_from_string(const std::string& name);

// One source sample contributing to an output position along a single axis.
struct Tap {
  int index;
  double weight;
};

// Source taps for output position `out_index` along an axis of length
// `in_size` downscaled to `out_size`.
//
// Convention (fixed so that an external checker can replicate the resampler
// bit for bit):
//   - center-aligned mapping: src = (dst + 0.5) * (in/out) - 0.5
//   - edge handling clamps source indices into [0, in_size-1]
//   - Nearest rounds half up
//   - clamped duplicate taps are merged and the weight set renormalized,
//     so weights always sum to exactly one
// Zero-weight taps are dropped.
std::vector<Tap> kernel_taps(const ResampleMethod& method, int in_size,
                             int out_size, int out_index);

// Separable downscale to (out_h, out_w). Output values are clipped to
// [0, 255]. Throws std::invalid_argument for non-positive output dims or an
// upscale request (out > in).
Image downscale(const Image& img, int out_h, int out_w,
                const ResampleMethod& method);

}  // namespace camo
