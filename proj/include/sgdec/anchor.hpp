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

#ifndef SGDEC_ANCHOR_HPP_
#define SGDEC_ANCHOR_HPP_

#include <cstddef>
#include <vector>

#include "sgdec/schema.hpp"

namespace sgdec {

enum class Slot { kSubject, kObject };

enum class AnchorOutcome { kSubject, kObject, kNotAnchor };

// Outcome of the anchor rule for one triple. A triple is an anchor exactly
// when the subject and object boxes overlap less than the threshold AND
// their areas differ; the decomposed element is then the strictly
// smaller-area participant. Equal areas never qualify (strict
// inequalities), and are tallied separately for observability.
struct AnchorDecision {
  RelationTriple triple;
  int triple_index = 0;  // position within the owning image's triple list
  AnchorOutcome decomposed = AnchorOutcome::kNotAnchor;
  double iou = 0.0;
  double subject_area = 0.0;
  double object_area = 0.0;

  bool is_anchor() const { return decomposed != AnchorOutcome::kNotAnchor; }
  Slot decomposed_slot() const;            // throws DataError for non-anchors
  std::uint64_t decomposed_id() const;     // instance id of the decomposed element
  std::uint64_t kept_id() const;           // instance id of the kept element
};

struct AnchorScanStats {
  std::size_t triples = 0;
  std::size_t anchors = 0;
  std::size_t rejected_overlap = 0;    // iou >= delta
  std::size_t rejected_equal_area = 0;  // iou < delta but areas tie
};

// Applies the anchor rule to one triple. delta is the IoU threshold in
// [0, 1]; both instances must resolve in the dataset.
AnchorDecision select_and_decompose(const RelationTriple& triple, const Dataset& ds,
                                    double delta);

// All anchor decisions of the dataset with outcome != NotAnchor, in
// deterministic (image order, then triple order) sequence.
std::vector<AnchorDecision> scan_anchors(const Dataset& ds, double delta,
                                         AnchorScanStats* stats = nullptr);

}  // namespace sgdec

#endif  // SGDEC_ANCHOR_HPP_
