#include "camo/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace camo {

namespace {

// Cardinal cubic kernel (Keys family). a = -0.5 gives Catmull-Rom.
double cubic_weight(double t, double a) {
  t = std::abs(t);
  if (t < 1.0) {
    return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  }
  if (t < 2.0) {
    return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
  }
  return 0.0;
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Merge duplicate (clamped) indices and drop negligible weights, then
// renormalize so the weights sum to one.
std::vector<Tap> finalize_taps(std::vector<Tap> taps) {
  std::sort(taps.begin(), taps.end(),
            [](const Tap& a, const Tap& b) { return a.index < b.index; });
  std::vector<Tap> merged;
  for (const Tap& t : taps) {
    if (!merged.empty() && merged.back().index == t.index) {
      merged.back().weight += t.weight;
    } else {
      merged.push_back(t);
    }
  }
  double sum = 0.0;
  for (const Tap& t : merged) sum += t.weight;
  std::vector<Tap> out;
  for (const Tap& t : merged) {
    if (std::abs(t.weight) > 1e-12) {
      out.push_back({t.index, t.weight / sum});
    }
  }
  return out;
}

}  // namespace

ResampleMethod ResampleMethod::bicubic(double a) {
  if (!std::isfinite(a) || a >= 0.0) {
    throw std::invalid_argument("bicubic sharpness must be finite and negative");
  }
  return {ResampleKind::kBicubic, a};
}

std::string to_string(const ResampleMethod& method) {
  switch (method.kind) {
    case ResampleKind::kNearest:
      return "nearest";
    case ResampleKind::kBilinear:
      return "bilinear";
    case ResampleKind::kBicubic:
      return "bicubic";
  }
  return "unknown";
}

ResampleMethod resample_method_from_string(const std::string& name) {
  if (name == "nearest") return ResampleMethod::nearest();
  if (name == "bilinear") return ResampleMethod::bilinear();
  if (name == "bicubic") return ResampleMethod::bicubic();
  throw std::invalid_argument("unknown resample method: " + name);
}

std::vector<Tap> kernel_taps(const ResampleMethod& method, int in_size,
                             int out_size, int out_index) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double src = (out_index + 0.5) * scale - 0.5;

  switch (method.kind) {
    case ResampleKind::kNearest: {
      // floor(src + 0.5) implements round-half-up; src >= 0 here since
      // scale >= 1.
      const int idx = clamp_index(static_cast<int>(std::floor(src + 0.5)),
                                  in_size);
      return {{idx, 1.0}};
    }
    case ResampleKind::kBilinear: {
      const int i0 = static_cast<int>(std::floor(src));
      const double f = src - i0;
      return finalize_taps({{clamp_index(i0, in_size), 1.0 - f},
                            {clamp_index(i0 + 1, in_size), f}});
    }
    case ResampleKind::kBicubic: {
      const int i0 = static_cast<int>(std::floor(src));
      const double f = src - i0;
      const double a = method.bicubic_a;
      return finalize_taps({{clamp_index(i0 - 1, in_size), cubic_weight(1.0 + f, a)},
                            {clamp_index(i0, in_size), cubic_weight(f, a)},
                            {clamp_index(i0 + 1, in_size), cubic_weight(1.0 - f, a)},
                            {clamp_index(i0 + 2, in_size), cubic_weight(2.0 - f, a)}});
    }
  }
  throw std::logic_error("unreachable resample kind");
}

Image downscale(const Image& img, int out_h, int out_w,
                const ResampleMethod& method) {
  if (out_h <= 0 || out_w <= 0) {
    throw std::invalid_argument("output dimensions must be positive");
  }
  if (out_h > img.height() || out_w > img.width()) {
    throw std::invalid_argument("upscaling is not supported");
  }

  std::vector<std::vector<Tap>> col_taps(out_w);
  for (int x = 0; x < out_w; ++x) {
    col_taps[x] = kernel_taps(method, img.width(), out_w, x);
  }
  std::vector<std::vector<Tap>> row_taps(out_h);
  for (int y = 0; y < out_h; ++y) {
    row_taps[y] = kernel_taps(method, img.height(), out_h, y);
  }

  // Horizontal pass, then vertical.
  const int c = Image::kChannels;
  std::vector<double> mid(static_cast<std::size_t>(img.height()) * out_w * c,
                          0.0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc[Image::kChannels] = {0.0, 0.0, 0.0};
      for (const Tap& t : col_taps[x]) {
        for (int ch = 0; ch < c; ++ch) {
          acc[ch] += t.weight * img.at(y, t.index, ch);
        }
      }
      const std::size_t base = (static_cast<std::size_t>(y) * out_w + x) * c;
      for (int ch = 0; ch < c; ++ch) {
        mid[base + ch] = acc[ch];
      }
    }
  }

  Image out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc[Image::kChannels] = {0.0, 0.0, 0.0};
      for (const Tap& t : row_taps[y]) {
        const std::size_t base =
            (static_cast<std::size_t>(t.index) * out_w + x) * c;
        for (int ch = 0; ch < c; ++ch) {
          acc[ch] += t.weight * mid[base + ch];
        }
      }
      for (int ch = 0; ch < c; ++ch) {
        out.at(y, x, ch) = std::clamp(acc[ch], 0.0, 255.0);
      }
    }
  }
  return out;
}

}  // namespace camo
