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

#include <algorithm>
#include <cmath>
#include <string>

#include "sgdec/errors.hpp"

namespace sgdec {

namespace {

std::string describe(double x_t, double y_t, double x_b, double y_b) {
  return "(" + std::to_string(x_t) + ", " + std::to_string(y_t) + ", " +
         std::to_string(x_b) + ", " + std::to_string(y_b) + ")";
}

}  // namespace

BoundingBox::BoundingBox(double x_t, double y_t, double x_b, double y_b)
    : x_t_(x_t), y_t_(y_t), x_b_(x_b), y_b_(y_b) {
  if (!std::isfinite(x_t) || !std::isfinite(y_t) || !std::isfinite(x_b) ||
      !std::isfinite(y_b)) {
    throw DataError("bounding box has non-finite coordinates " +
                    describe(x_t, y_t, x_b, y_b));
  }
  if (x_t < 0.0 || y_t < 0.0) {
    throw DataError("bounding box has negative coordinates " +
                    describe(x_t, y_t, x_b, y_b));
  }
  if (!(x_b > x_t) || !(y_b > y_t)) {
    throw DataError("bounding box needs positive width and height " +
                    describe(x_t, y_t, x_b, y_b));
  }
}

double area(const BoundingBox& b) { return b.area(); }

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double overlap_w = std::min(a.x_b(), b.x_b()) - std::max(a.x_t(), b.x_t());
  const double overlap_h = std::min(a.y_b(), b.y_b()) - std::max(a.y_t(), b.y_t());
  if (overlap_w <= 0.0 || overlap_h <= 0.0) return 0.0;
  const double intersection = overlap_w * overlap_h;
  return intersection / (a.area() + b.area() - intersection);
}

BoundingBox normalize_to_origin(const BoundingBox& b) {
  return BoundingBox(0.0, 0.0, b.width(), b.height());
}

double shape_similarity(const BoundingBox& a, const BoundingBox& b) {
  const BoundingBox na = normalize_to_origin(a);
  const BoundingBox nb = normalize_to_origin(b);
  const double overlap = std::min(na.x_b(), nb.x_b()) * std::min(na.y_b(), nb.y_b());
  return overlap / (na.x_b() * na.y_b() + nb.x_b() * nb.y_b() - overlap);
}

}  // namespace sgdec
