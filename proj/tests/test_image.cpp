#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "camo/image.hpp"
#include "camo/rng.hpp"
#include "helpers.hpp"

using namespace camo;

TEST_CASE("image construction validates shape and range") {
  Image img(4, 5, 17.0);
  CHECK(img.height() == 4);
  CHECK(img.width() == 5);
  CHECK(img.size() == 4u * 5u * 3u);
  CHECK(img.at(3, 4, 2) == 17.0);

  CHECK_THROWS_AS(Image(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(Image(3, -1), std::invalid_argument);
  CHECK_THROWS_AS(Image(2, 2, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(Image::from_data(2, 2, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      Image::from_data(1, 1, {0.0, 0.0, 256.0}), std::invalid_argument);
  Image ok = Image::from_data(1, 1, {0.0, 128.0, 255.0});
  CHECK(ok.at(0, 0, 1) == 128.0);
}

TEST_CASE("clip saturates both ends and is idempotent") {
  Image img(1, 3);
  img.data() = {300.0, -4.2, 127.5, 0.0, 255.0, 256.0, -1.0, 50.0, 200.0};
  Image clipped = clip(img);
  CHECK(clipped.at(0, 0, 0) == 255.0);
  CHECK(clipped.at(0, 0, 1) == 0.0);
  CHECK(clipped.at(0, 0, 2) == 127.5);
  Image twice = clip(clipped);
  for (std::size_t i = 0; i < twice.size(); ++i)
    CHECK(twice.data()[i] == clipped.data()[i]);
}

TEST_CASE("apply_perturbation follows clip(img + delta*255)") {
  Image img(1, 1);
  img.data() = {250.0, 100.0, 10.0};
  Perturbation delta(1, 1, 0.02);
  delta.data() = {0.02, -0.02, 0.0};

  Image adv = apply_perturbation(img, delta);
  CHECK(adv.at(0, 0, 0) == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(adv.at(0, 0, 1) == doctest::Approx(94.9).epsilon(1e-12));
  CHECK(adv.at(0, 0, 2) == 10.0);

  SUBCASE("zero delta is the identity") {
    Perturbation zero(1, 1, 0.02);
    Image same = apply_perturbation(img, zero);
    for (std::size_t i = 0; i < img.size(); ++i)
      CHECK(same.data()[i] == img.data()[i]);
  }

  SUBCASE("shape mismatch throws") {
    Perturbation wrong(2, 1, 0.02);
    CHECK_THROWS_AS(apply_perturbation(img, wrong), std::invalid_argument);
  }
}

TEST_CASE("visual_distance matches the normalized l2 formula") {
  SUBCASE("identical images give exactly zero") {
    Image a = testutil::random_image(5, 7, 11);
    CHECK(visual_distance(a, a) == 0.0);
  }

  SUBCASE("all-0 vs all-255 saturates at 1 for any shape") {
    for (auto [h, w] : {std::pair{1, 1}, {3, 4}, {7, 2}}) {
      Image zero(h, w, 0.0);
      Image full(h, w, 255.0);
      CHECK(visual_distance(zero, full) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("single differing channel gives 1/sqrt(3)") {
    Image a(1, 1, 0.0);
    Image b(1, 1, 0.0);
    b.at(0, 0, 0) = 255.0;
    CHECK(visual_distance(a, b) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  }

  SUBCASE("symmetry and range on random pairs") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
      const int h = 1 + static_cast<int>(rng.uniform_index(6));
      const int w = 1 + static_cast<int>(rng.uniform_index(6));
      Image a = testutil::random_image(h, w, rng.next_u64());
      Image b = testutil::random_image(h, w, rng.next_u64());
      const double ab = visual_distance(a, b);
      const double ba = visual_distance(b, a);
      CHECK(ab == ba);
      CHECK(ab >= 0.0);
      CHECK(ab <= 1.0);
    }
  }

  SUBCASE("triangle inequality on random triples") {
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
      Image a = testutil::random_image(4, 4, rng.next_u64());
      Image b = testutil::random_image(4, 4, rng.next_u64());
      Image c = testutil::random_image(4, 4, rng.next_u64());
      CHECK(visual_distance(a, c) <=
            visual_distance(a, b) + visual_distance(b, c) + 1e-12);
    }
  }

  SUBCASE("bounded perturbations keep distance within epsilon") {
    Rng rng(44);
    for (int trial = 0; trial < 50; ++trial) {
      const double eps = rng.uniform(0.0, 0.1);
      Image img = testutil::random_image(6, 3, rng.next_u64());
      Perturbation delta(6, 3, eps);
      for (double& v : delta.data()) v = rng.uniform(-eps, eps);
      CHECK(visual_distance(img, apply_perturbation(img, delta)) <=
            eps + 1e-12);
    }
  }
}

TEST_CASE("perturbation projection and norms") {
  Perturbation delta(2, 2, 0.02);
  delta.data()[0] = 0.5;
  delta.data()[5] = -0.3;
  delta.data()[7] = 0.01;
  delta.project();
  CHECK(delta.data()[0] == 0.02);
  CHECK(delta.data()[5] == -0.02);
  CHECK(delta.data()[7] == 0.01);
  CHECK(delta.linf_norm() == 0.02);
  CHECK(delta.mean_abs() ==
        doctest::Approx((0.02 + 0.02 + 0.01) / 12.0).epsilon(1e-12));
}

TEST_CASE("perturbation checksum is order-sensitive and stable") {
  Perturbation a(1, 2, 1.0);
  a.data() = {0.1, -0.2, 0.3, 0.0, 0.0, 0.0};
  Perturbation b = a;
  CHECK(a.checksum() == b.checksum());
  std::swap(b.data()[0], b.data()[1]);
  CHECK(a.checksum() != b.checksum());
}

TEST_CASE("quantize rounds half up to the 8-bit grid") {
  Image img(1, 1);
  img.data() = {10.5, 10.49, 254.6};
  Image q = quantize(img);
  CHECK(q.at(0, 0, 0) == 11.0);
  CHECK(q.at(0, 0, 1) == 10.0);
  CHECK(q.at(0, 0, 2) == 255.0);
}
