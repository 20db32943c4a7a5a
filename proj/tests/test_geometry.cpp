// Copyright (c) 2026, the sgdec authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sgdec/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "sgdec/errors.hpp"

namespace sgdec {
namespace {

// Independent evaluation of the shape-similarity definition: translate both
// top-left corners to the origin, overlap the normalized boxes, and divide
// by the union of their areas. Kept free of the library's BoundingBox
// helpers on purpose.
double brute_shape_similarity(double ax_t, double ay_t, double ax_b, double ay_b,
                              double bx_t, double by_t, double bx_b, double by_b) {
  const double au_x = ax_b - ax_t, au_y = ay_b - ay_t;
  const double bv_x = bx_b - bx_t, bv_y = by_b - by_t;
  const double ins = (au_x < bv_x ? au_x : bv_x) * (au_y < bv_y ? au_y : bv_y);
  return ins / (au_x * au_y + bv_x * bv_y - ins);
}

double brute_iou(double ax_t, double ay_t, double ax_b, double ay_b, double bx_t,
                 double by_t, double bx_b, double by_b) {
  const double left = ax_t > bx_t ? ax_t : bx_t;
  const double top = ay_t > by_t ? ay_t : by_t;
  const double right = ax_b < bx_b ? ax_b : bx_b;
  const double bottom = ay_b < by_b ? ay_b : by_b;
  double inter = 0.0;
  if (right > left && bottom > top) inter = (right - left) * (bottom - top);
  const double area_a = (ax_b - ax_t) * (ay_b - ay_t);
  const double area_b = (bx_b - bx_t) * (by_b - by_t);
  return inter == 0.0 ? 0.0 : inter / (area_a + area_b - inter);
}

BoundingBox random_valid_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, 900.0);
  std::uniform_real_distribution<double> extent(0.5, 450.0);
  const double x_t = coord(rng), y_t = coord(rng);
  return BoundingBox(x_t, y_t, x_t + extent(rng), y_t + extent(rng));
}

TEST_SUITE("geometry") {

TEST_CASE("area matches hand arithmetic") {
  CHECK(area(BoundingBox(0, 0, 10, 10)) == 100.0);
  CHECK(area(BoundingBox(2, 3, 5, 7)) == 12.0);
  CHECK(area(BoundingBox(0, 0, 1, 1000)) == 1000.0);
}

TEST_CASE("construction rejects invalid boxes") {
  CHECK_THROWS_AS(BoundingBox(0, 0, 0, 10), DataError);    // zero width
  CHECK_THROWS_AS(BoundingBox(0, 0, 10, 0), DataError);    // zero height
  CHECK_THROWS_AS(BoundingBox(5, 0, 2, 10), DataError);    // inverted x
  CHECK_THROWS_AS(BoundingBox(0, 5, 10, 2), DataError);    // inverted y
  CHECK_THROWS_AS(BoundingBox(-1, 0, 10, 10), DataError);  // negative
  CHECK_THROWS_AS(BoundingBox(0, 0, std::nan(""), 10), DataError);
  CHECK_THROWS_AS(BoundingBox(0, 0, INFINITY, 10), DataError);
}

TEST_CASE("iou identity, disjoint and partial overlap") {
  const BoundingBox a(0, 0, 10, 10);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, BoundingBox(20, 20, 30, 30)) == 0.0);
  CHECK(iou(a, BoundingBox(5, 0, 15, 10)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("normalize_to_origin keeps extents") {
  CHECK(normalize_to_origin(BoundingBox(3, 4, 10, 9)) == BoundingBox(0, 0, 7, 5));
  CHECK(normalize_to_origin(BoundingBox(0, 0, 7, 5)) == BoundingBox(0, 0, 7, 5));
  CHECK(normalize_to_origin(BoundingBox(100, 200, 101, 201)) ==
        BoundingBox(0, 0, 1, 1));
}

TEST_CASE("shape similarity hand cases") {
  // Identical extents anywhere in the plane compare as 1.
  CHECK(shape_similarity(BoundingBox(0, 0, 7, 5), BoundingBox(10, 10, 17, 15)) ==
        1.0);
  // 2x2 vs 4x4: overlap 4 over union 4 + 16 - 4.
  CHECK(shape_similarity(BoundingBox(0, 0, 2, 2), BoundingBox(0, 0, 4, 4)) ==
        doctest::Approx(0.25).epsilon(1e-15));
  // 4x1 vs 1x4: aspect-sensitive, overlap 1 over 4 + 4 - 1.
  CHECK(shape_similarity(BoundingBox(0, 0, 4, 1), BoundingBox(0, 0, 1, 4)) ==
        doctest::Approx(1.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("shape similarity is symmetric, bounded and translation-invariant") {
  std::mt19937_64 rng(314159);
  for (int i = 0; i < 2000; ++i) {
    const BoundingBox a = random_valid_box(rng);
    const BoundingBox b = random_valid_box(rng);
    const double m = shape_similarity(a, b);
    CHECK(m == shape_similarity(b, a));
    CHECK(m > 0.0);
    CHECK(m <= 1.0);

    std::uniform_real_distribution<double> shift(0.0, 500.0);
    const double dx = shift(rng), dy = shift(rng);
    const BoundingBox moved(a.x_t() + dx, a.y_t() + dy, a.x_b() + dx, a.y_b() + dy);
    CHECK(shape_similarity(moved, b) == m);
  }
}

TEST_CASE("shape similarity equals 1 exactly for equal extents only") {
  const BoundingBox a(1, 2, 5, 8);  // 4 x 6
  CHECK(shape_similarity(a, BoundingBox(11, 0, 15, 6)) == 1.0);
  CHECK(shape_similarity(a, BoundingBox(1, 2, 5, 9)) < 1.0);
  CHECK(shape_similarity(a, BoundingBox(1, 2, 6, 8)) < 1.0);
}

TEST_CASE("iou bounds, symmetry and identity on random boxes") {
  std::mt19937_64 rng(271828);
  for (int i = 0; i < 2000; ++i) {
    const BoundingBox a = random_valid_box(rng);
    const BoundingBox b = random_valid_box(rng);
    const double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == iou(b, a));
    CHECK(iou(a, a) == 1.0);
  }
}

TEST_CASE("randomized cross-check against brute-force definitions") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 10000; ++i) {
    const BoundingBox a = random_valid_box(rng);
    const BoundingBox b = random_valid_box(rng);

    const double expected_m =
        brute_shape_similarity(a.x_t(), a.y_t(), a.x_b(), a.y_b(), b.x_t(), b.y_t(),
                               b.x_b(), b.y_b());
    CHECK(shape_similarity(a, b) == doctest::Approx(expected_m).epsilon(1e-12));

    const double expected_iou = brute_iou(a.x_t(), a.y_t(), a.x_b(), a.y_b(),
                                          b.x_t(), b.y_t(), b.x_b(), b.y_b());
    CHECK(iou(a, b) == doctest::Approx(expected_iou).epsilon(1e-12));
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace sgdec
