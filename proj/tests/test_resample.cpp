#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"

#include "brute_force.hpp"
#include "camo/image.hpp"
#include "camo/resample.hpp"
#include "camo/rng.hpp"
#include "helpers.hpp"

using namespace camo;

namespace {

const ResampleMethod kMethods[] = {ResampleMethod::nearest(),
                                   ResampleMethod::bilinear(),
                                   ResampleMethod::bicubic()};

// Single-channel helper: replicate the plane into all three channels.
Image plane(const std::vector<std::vector<double>>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows[0].size());
  Image img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < 3; ++ch) img.at(y, x, ch) = rows[y][x];
  return img;
}

}  // namespace

TEST_CASE("hand-traced 2x2 -> 1x1 examples") {
  Image img = plane({{10.0, 20.0}, {30.0, 40.0}});

  Image bilinear = downscale(img, 1, 1, ResampleMethod::bilinear());
  CHECK(bilinear.at(0, 0, 0) == doctest::Approx(25.0).epsilon(1e-12));

  Image nearest = downscale(img, 1, 1, ResampleMethod::nearest());
  CHECK(nearest.at(0, 0, 0) == 40.0);
}

TEST_CASE("constant images stay constant under every method") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int out_h = 1 + static_cast<int>(rng.uniform_index(6));
    const int out_w = 1 + static_cast<int>(rng.uniform_index(6));
    const int in_h = out_h * (1 + static_cast<int>(rng.uniform_index(5)));
    const int in_w = out_w * (1 + static_cast<int>(rng.uniform_index(5)));
    const double value = rng.uniform(0.0, 255.0);
    Image img(in_h, in_w, value);
    for (const ResampleMethod& method : kMethods) {
      Image out = downscale(img, out_h, out_w, method);
      for (double v : out.data())
        CHECK(std::fabs(v - value) <= 1e-9);
    }
  }
}

TEST_CASE("nearest output values come from the input value set") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int in_h = 2 + static_cast<int>(rng.uniform_index(14));
    const int in_w = 2 + static_cast<int>(rng.uniform_index(14));
    const int out_h = 1 + static_cast<int>(rng.uniform_index(in_h));
    const int out_w = 1 + static_cast<int>(rng.uniform_index(in_w));
    Image img = testutil::random_image(in_h, in_w, rng.next_u64());
    std::set<double> values(img.data().begin(), img.data().end());
    Image out = downscale(img, out_h, out_w, ResampleMethod::nearest());
    for (double v : out.data()) CHECK(values.count(v) == 1);
  }
}

TEST_CASE("separable implementation agrees with the direct 2d reference") {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const int in_h = 3 + static_cast<int>(rng.uniform_index(20));
    const int in_w = 3 + static_cast<int>(rng.uniform_index(20));
    const int out_h = 1 + static_cast<int>(rng.uniform_index(in_h));
    const int out_w = 1 + static_cast<int>(rng.uniform_index(in_w));
    Image img = testutil::random_image(in_h, in_w, rng.next_u64());
    for (const ResampleMethod& method : kMethods) {
      Image ours = downscale(img, out_h, out_w, method);
      Image ref = bf::downscale_reference(img, out_h, out_w, method);
      REQUIRE(ours.same_shape(ref));
      for (std::size_t i = 0; i < ours.size(); ++i)
        CHECK(ours.data()[i] == doctest::Approx(ref.data()[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("same-size downscale is the identity") {
  Image img = testutil::random_image(6, 5, 12345);
  for (const ResampleMethod& method : kMethods) {
    Image out = downscale(img, 6, 5, method);
    for (std::size_t i = 0; i < img.size(); ++i)
      CHECK(out.data()[i] == doctest::Approx(img.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("bicubic output is clipped to the valid range") {
  // A hard step excites the negative lobes of the cubic kernel.
  Image img(1, 8, 0.0);
  for (int x = 4; x < 8; ++x)
    for (int ch = 0; ch < 3; ++ch) img.at(0, x, ch) = 255.0;
  Image out = downscale(img, 1, 4, ResampleMethod::bicubic());
  for (double v : out.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 255.0);
  }
}

TEST_CASE("downscale rejects bad output shapes") {
  Image img(4, 4, 1.0);
  CHECK_THROWS_AS(downscale(img, 0, 2, ResampleMethod::nearest()),
                  std::invalid_argument);
  CHECK_THROWS_AS(downscale(img, 2, -1, ResampleMethod::nearest()),
                  std::invalid_argument);
  CHECK_THROWS_AS(downscale(img, 8, 2, ResampleMethod::bilinear()),
                  std::invalid_argument);
  CHECK_THROWS_AS(downscale(img, 2, 8, ResampleMethod::bicubic()),
                  std::invalid_argument);
}

TEST_CASE("method helpers") {
  CHECK(to_string(ResampleMethod::nearest()) == "nearest");
  CHECK(to_string(ResampleMethod::bilinear()) == "bilinear");
  CHECK(to_string(ResampleMethod::bicubic()) == "bicubic");
  CHECK(resample_method_from_string("bicubic").kind ==
        ResampleKind::kBicubic);
  CHECK_THROWS_AS(resample_method_from_string("lanczos"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ResampleMethod::bicubic(0.5), std::invalid_argument);
  CHECK_THROWS_AS(ResampleMethod::bicubic(0.0), std::invalid_argument);
}

TEST_CASE("kernel taps sum to one") {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const int out = 1 + static_cast<int>(rng.uniform_index(8));
    const int in = out + static_cast<int>(rng.uniform_index(40));
    const int idx = static_cast<int>(rng.uniform_index(out));
    for (const ResampleMethod& method : kMethods) {
      double sum = 0.0;
      for (const Tap& t : kernel_taps(method, in, out, idx)) sum += t.weight;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}
