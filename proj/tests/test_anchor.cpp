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

#include "sgdec/anchor.hpp"

#include <doctest.h>

#include <random>

#include "sgdec/errors.hpp"
#include "testutil.hpp"

namespace sgdec {
namespace {

// Independent rendering of the selection rule: subject when the overlap is
// under the threshold and the subject box is strictly smaller, object in
// the mirrored case, otherwise not an anchor. Uses its own overlap
// arithmetic.
int brute_rule(double sx_t, double sy_t, double sx_b, double sy_b, double ox_t,
               double oy_t, double ox_b, double oy_b, double delta) {
  const double left = sx_t > ox_t ? sx_t : ox_t;
  const double top = sy_t > oy_t ? sy_t : oy_t;
  const double right = sx_b < ox_b ? sx_b : ox_b;
  const double bottom = sy_b < oy_b ? sy_b : oy_b;
  const double inter =
      (right > left && bottom > top) ? (right - left) * (bottom - top) : 0.0;
  const double area_s = (sx_b - sx_t) * (sy_b - sy_t);
  const double area_o = (ox_b - ox_t) * (oy_b - oy_t);
  const double overlap = inter / (area_s + area_o - inter);
  if (overlap < delta && area_s < area_o) return 0;  // subject
  if (overlap < delta && area_s > area_o) return 1;  // object
  return -1;
}

struct TriplePair {
  Dataset ds;
  RelationTriple triple;
};

TriplePair pair_dataset(const BoundingBox& subject, const BoundingBox& object) {
  TriplePair tp;
  tp.ds = test::make_dataset(
      test::small_vocab(2, 1),
      {test::make_image(1, 2000, 2000, {{1, 0, subject, {}}, {2, 1, object, {}}},
                        {{1, 1, 2}})});
  tp.triple = tp.ds.images[0].triples[0];
  return tp;
}

BoundingBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, 900.0);
  std::uniform_real_distribution<double> extent(1.0, 400.0);
  const double x_t = coord(rng), y_t = coord(rng);
  return BoundingBox(x_t, y_t, x_t + extent(rng), y_t + extent(rng));
}

TEST_SUITE("anchor") {

TEST_CASE("small disjoint subject decomposes") {
  const auto tp = pair_dataset(BoundingBox(0, 0, 2, 2), BoundingBox(10, 10, 20, 20));
  const AnchorDecision decision = select_and_decompose(tp.triple, tp.ds, 0.3);
  CHECK(decision.decomposed == AnchorOutcome::kSubject);
  CHECK(decision.iou == 0.0);
  CHECK(decision.subject_area == 4.0);
  CHECK(decision.object_area == 100.0);
  CHECK(decision.decomposed_id() == 1);
  CHECK(decision.kept_id() == 2);
}

TEST_CASE("heavy overlap is not an anchor") {
  // Contained box: overlap 36 over union 100.
  const auto tp = pair_dataset(BoundingBox(0, 0, 10, 10), BoundingBox(2, 2, 8, 8));
  const AnchorDecision decision = select_and_decompose(tp.triple, tp.ds, 0.3);
  CHECK(decision.iou == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(decision.decomposed == AnchorOutcome::kNotAnchor);
}

TEST_CASE("equal areas never qualify") {
  const auto tp =
      pair_dataset(BoundingBox(0, 0, 10, 10), BoundingBox(100, 100, 110, 110));
  const AnchorDecision decision = select_and_decompose(tp.triple, tp.ds, 0.3);
  CHECK(decision.decomposed == AnchorOutcome::kNotAnchor);
  CHECK_THROWS_AS(decision.decomposed_slot(), DataError);
}

TEST_CASE("agrees exactly with the brute-force rule on random pairs") {
  std::mt19937_64 rng(90210);
  for (const double delta : {0.1, 0.3, 0.5}) {
    for (int i = 0; i < 10000; ++i) {
      const BoundingBox subject = random_box(rng);
      const BoundingBox object = random_box(rng);
      const auto tp = pair_dataset(subject, object);
      const AnchorDecision decision = select_and_decompose(tp.triple, tp.ds, delta);
      const int expected =
          brute_rule(subject.x_t(), subject.y_t(), subject.x_b(), subject.y_b(),
                     object.x_t(), object.y_t(), object.x_b(), object.y_b(), delta);
      const int actual = decision.decomposed == AnchorOutcome::kSubject  ? 0
                         : decision.decomposed == AnchorOutcome::kObject ? 1
                                                                         : -1;
      REQUIRE(actual == expected);
    }
  }
}

TEST_CASE("swapping subject and object flips the decision") {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 3000; ++i) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    const auto forward = select_and_decompose(pair_dataset(a, b).triple,
                                              pair_dataset(a, b).ds, 0.3);
    const auto reversed = select_and_decompose(pair_dataset(b, a).triple,
                                               pair_dataset(b, a).ds, 0.3);
    switch (forward.decomposed) {
      case AnchorOutcome::kSubject:
        CHECK(reversed.decomposed == AnchorOutcome::kObject);
        break;
      case AnchorOutcome::kObject:
        CHECK(reversed.decomposed == AnchorOutcome::kSubject);
        break;
      case AnchorOutcome::kNotAnchor:
        CHECK(reversed.decomposed == AnchorOutcome::kNotAnchor);
        break;
    }
  }
}

TEST_CASE("anchors stay anchors as the threshold grows") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 3000; ++i) {
    const auto tp = pair_dataset(random_box(rng), random_box(rng));
    const auto tight = select_and_decompose(tp.triple, tp.ds, 0.2);
    const auto loose = select_and_decompose(tp.triple, tp.ds, 0.6);
    if (tight.is_anchor()) {
      CHECK(loose.decomposed == tight.decomposed);
    }
  }
}

TEST_CASE("scan returns anchors in image and triple order") {
  Dataset ds = test::make_dataset(
      test::small_vocab(2, 2),
      {test::make_image(3, 1000, 1000,
                        {{31, 0, BoundingBox(0, 0, 2, 2), {}},
                         {32, 1, BoundingBox(10, 10, 20, 20), {}}},
                        {{31, 1, 32}}),
       test::make_image(7, 1000, 1000,
                        {{71, 0, BoundingBox(0, 0, 10, 10), {}},
                         {72, 1, BoundingBox(0, 0, 10, 10), {}},
                         {73, 1, BoundingBox(500, 500, 600, 600), {}}},
                        {{71, 1, 72}, {73, 2, 71}})});

  AnchorScanStats stats;
  const auto anchors = scan_anchors(ds, 0.3, &stats);
  CHECK(stats.triples == 3);
  CHECK(stats.anchors == 2);
  CHECK(stats.rejected_overlap == 1);  // 71 vs 72 overlap fully
  REQUIRE(anchors.size() == 2);
  CHECK(anchors[0].triple.image_id == 3);
  CHECK(anchors[0].triple_index == 0);
  CHECK(anchors[1].triple.image_id == 7);
  CHECK(anchors[1].triple_index == 1);
  CHECK(anchors[1].decomposed == AnchorOutcome::kObject);  // 73 bigger than 71

  // A dataset where every pair overlaps heavily yields nothing.
  Dataset overlapping = test::make_dataset(
      test::small_vocab(2, 1),
      {test::make_image(1, 100, 100,
                        {{1, 0, BoundingBox(0, 0, 50, 50), {}},
                         {2, 1, BoundingBox(1, 1, 51, 51), {}}},
                        {{1, 1, 2}})});
  CHECK(scan_anchors(overlapping, 0.3).empty());
}

TEST_CASE("threshold outside [0,1] is rejected") {
  const auto tp = pair_dataset(BoundingBox(0, 0, 2, 2), BoundingBox(5, 5, 9, 9));
  CHECK_THROWS_AS(select_and_decompose(tp.triple, tp.ds, -0.1), DataError);
  CHECK_THROWS_AS(select_and_decompose(tp.triple, tp.ds, 1.5), DataError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace sgdec
