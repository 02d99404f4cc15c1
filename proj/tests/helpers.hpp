#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>

#include "camo/image.hpp"
#include "camo/rng.hpp"

namespace testutil {

// Unique scratch directory, removed with everything in it on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const int id = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("camo_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline camo::Image random_image(int h, int w, std::uint64_t seed) {
  camo::Rng rng(seed);
  camo::Image img(h, w);
  for (double& v : img.data()) v = rng.uniform(0.0, 255.0);
  return img;
}

// 8-bit-exact random image (every value on the integer grid).
inline camo::Image random_image_u8(int h, int w, std::uint64_t seed) {
  camo::Rng rng(seed);
  camo::Image img(h, w);
  for (double& v : img.data())
    v = static_cast<double>(rng.uniform_index(256));
  return img;
}

// Smooth, deterministic backdrop with distinct channel ramps.
inline camo::Image gradient_image(int h, int w) {
  camo::Image img(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(y, x, 0) = 40.0 + 150.0 * y / std::max(1, h - 1);
      img.at(y, x, 1) = 200.0 - 120.0 * x / std::max(1, w - 1);
      img.at(y, x, 2) =
          60.0 + 80.0 * (y + x) / std::max(1, h + w - 2);
    }
  }
  return img;
}

inline std::string fixture_path(const std::string& name) {
  return std::string(CAMO_FIXTURES_DIR) + "/" + name;
}

}  // namespace testutil
