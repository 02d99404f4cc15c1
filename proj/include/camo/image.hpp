#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace camo {

// Dense H x W x 3 grid of intensities in [0, 255], row-major by
// (row, col, channel). Arithmetic stays in double end to end; rounding to
// the 8-bit grid happens only at PNG export.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int height, int width, double fill = 0.0);

  // Takes ownership of `data` (length must be height*width*3, values in
  // [0, 255]). Throws std::invalid_argument otherwise.
  static Image from_data(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double at(int row, int col, int ch) const {
    return data_[index(row, col, ch)];
  }
  double& at(int row, int col, int ch) { return data_[index(row, col, ch)]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * kChannels + ch;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// Additive offset grid in normalized units (fractions of the full 0..255
// range), bounded by the budget epsilon: every element stays in
// [-epsilon, +epsilon] via project(). Same spatial shape as its target.
class Perturbation {
 public:
  Perturbation() = default;
  Perturbation(int height, int width, double epsilon);

  int height() const { return height_; }
  int width() const { return width_; }
  double epsilon() const { return epsilon_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }
  std::size_t size() const { return data_.size(); }

  // Clamp every element back into [-epsilon, +epsilon].
  void project();

  double linf_norm() const;
  double mean_abs() const;

  // Order-sensitive digest of the raw double values; used for deterministic
  // tie-breaking and for record bookkeeping.
  std::uint64_t checksum() const;

  bool shape_matches(const Image& img) const {
    return height_ == img.height() && width_ == img.width();
  }

 private:
  int height_ = 0;
  int width_ = 0;
  double epsilon_ = 0.0;
  std::vector<double> data_;
};

// Elementwise clamp to [0, 255]. Idempotent.
Image clip(Image img);

// clip(img + delta * 255): the normalized-unit offset is scaled to intensity
// levels before addition. Throws std::invalid_argument on shape mismatch.
Image apply_perturbation(const Image& img, const Perturbation& delta);

// Normalized L2 distance ||a - b||_2 / (255 * sqrt(H*W*3)), in [0, 1].
double visual_distance(const Image& a, const Image& b);

// Round every element to the nearest 8-bit level. Models PNG export without
// leaving double storage.
Image quantize(const Image& img);

}  // namespace camo
