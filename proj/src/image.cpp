#include "camo/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace camo {

Image::Image(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (fill < 0.0 || fill > 255.0) {
    throw std::invalid_argument("fill value outside [0, 255]");
  }
  data_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

Image Image::from_data(int height, int width, std::vector<double> data) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  const std::size_t expected =
      static_cast<std::size_t>(height) * width * kChannels;
  if (data.size() != expected) {
    throw std::invalid_argument("image data length does not match H*W*3");
  }
  for (double v : data) {
    if (!(v >= 0.0 && v <= 255.0)) {
      throw std::invalid_argument("image intensity outside [0, 255]");
    }
  }
  Image img;
  img.height_ = height;
  img.width_ = width;
  img.data_ = std::move(data);
  return img;
}

Perturbation::Perturbation(int height, int width, double epsilon)
    : height_(height), width_(width), epsilon_(epsilon) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("perturbation dimensions must be positive");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  data_.assign(static_cast<std::size_t>(height) * width * Image::kChannels,
               0.0);
}

void Perturbation::project() {
  for (double& v : data_) {
    v = std::clamp(v, -epsilon_, epsilon_);
  }
}

double Perturbation::linf_norm() const {
  double m = 0.0;
  for (double v : data_) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

double Perturbation::mean_abs() const {
  if (data_.empty()) return 0.0;
  double s = 0.0;
  for (double v : data_) {
    s += std::abs(v);
  }
  return s / static_cast<double>(data_.size());
}

std::uint64_t Perturbation::checksum() const {
  // FNV-1a over the little-endian byte image of each double.
  std::uint64_t h = 1469598103934665603ull;
  for (double v : data_) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

Image clip(Image img) {
  for (double& v : img.data()) {
    v = std::clamp(v, 0.0, 255.0);
  }
  return img;
}

Image apply_perturbation(const Image& img, const Perturbation& delta) {
  if (!delta.shape_matches(img)) {
    throw std::invalid_argument("perturbation shape does not match image");
  }
  Image out = img;
  const std::vector<double>& d = delta.data();
  std::vector<double>& o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = std::clamp(o[i] + d[i] * 255.0, 0.0, 255.0);
  }
  return out;
}

double visual_distance(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("visual_distance requires matching shapes");
  }
  double sq = 0.0;
  const std::vector<double>& av = a.data();
  const std::vector<double>& bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double diff = av[i] - bv[i];
    sq += diff * diff;
  }
  const double denom = 255.0 * std::sqrt(static_cast<double>(av.size()));
  return std::sqrt(sq) / denom;
}

Image quantize(const Image& img) {
  Image out = img;
  for (double& v : out.data()) {
    v = std::clamp(std::floor(v + 0.5), 0.0, 255.0);
  }
  return out;
}

}  // namespace camo
