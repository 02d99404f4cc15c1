#pragma once

#include <cstdint>

#include "camo/image.hpp"
#include "camo/resample.hpp"

namespace camo {

// Recipe for hiding a low-resolution payload inside a high-resolution
// source: the embedded image downscales (with `method`, by `scale_*`) to the
// payload while source pixels outside the kernels' critical support move by
// at most `max_deviation` intensity levels.
struct EmbedSpec {
  Image target_payload;
  int scale_y = 1;
  int scale_x = 1;
  ResampleMethod method;
  double max_deviation = 16.0;
};

struct EmbedResult {
  Image image;
  // Worst |downscale(image) - payload| over all payload pixels/channels.
  double max_residual = 0.0;
  int sweeps = 0;
};

// Per-method residual the embedding must meet before it is considered
// feasible (intensity levels).
double embed_tolerance(const ResampleMethod& method);

// Solve the embedding and report the achieved residual without judging
// feasibility.
EmbedResult embed_payload_detailed(const Image& source, const EmbedSpec& spec);

// As above, but throws EmbedInfeasible when the residual exceeds
// embed_tolerance(spec.method). Throws std::invalid_argument when
// payload dims x scale factor != source dims.
Image embed_payload(const Image& source, const EmbedSpec& spec);

// I.i.d. uniform draw on [-epsilon, +epsilon] per element; bit-reproducible
// for a given seed.
Perturbation sample_initial_perturbation(int height, int width,
                                         double epsilon, std::uint64_t seed);

}  // namespace camo
