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

#ifndef SGDEC_GEOMETRY_HPP_
#define SGDEC_GEOMETRY_HPP_

namespace sgdec {

// Axis-aligned rectangle in pixel coordinates: (x_t, y_t) top-left corner,
// (x_b, y_b) bottom-right. Coordinates are kept as doubles so products of
// large pixel extents never overflow. Construction enforces finite,
// non-negative coordinates and strictly positive width and height; all
// functions below may therefore assume a valid box.
class BoundingBox {
 public:
  BoundingBox() = default;  // unit box at the origin
  BoundingBox(double x_t, double y_t, double x_b, double y_b);

  double x_t() const { return x_t_; }
  double y_t() const { return y_t_; }
  double x_b() const { return x_b_; }
  double y_b() const { return y_b_; }

  double width() const { return x_b_ - x_t_; }
  double height() const { return y_b_ - y_t_; }
  double area() const { return width() * height(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x_t_ = 0.0;
  double y_t_ = 0.0;
  double x_b_ = 1.0;
  double y_b_ = 1.0;
};

double area(const BoundingBox& b);

// Intersection area over union area; 0 for disjoint boxes, 1 iff identical.
double iou(const BoundingBox& a, const BoundingBox& b);

// Translates the box so its top-left corner sits at (0, 0).
BoundingBox normalize_to_origin(const BoundingBox& b);

// Overlap ratio of the two origin-normalized boxes:
// min(w_a, w_b) * min(h_a, h_b) / (w_a*h_a + w_b*h_b - overlap).
// Symmetric, translation-invariant, in (0, 1], and 1 exactly when the
// widths match and the heights match.
double shape_similarity(const BoundingBox& a, const BoundingBox& b);

}  // namespace sgdec

#endif  // SGDEC_GEOMETRY_HPP_
