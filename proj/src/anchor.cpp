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

#include <string>

#include "sgdec/errors.hpp"
#include "sgdec/geometry.hpp"

namespace sgdec {

Slot AnchorDecision::decomposed_slot() const {
  switch (decomposed) {
    case AnchorOutcome::kSubject:
      return Slot::kSubject;
    case AnchorOutcome::kObject:
      return Slot::kObject;
    default:
      throw DataError("triple is not an anchor; no decomposed slot");
  }
}

std::uint64_t AnchorDecision::decomposed_id() const {
  return decomposed_slot() == Slot::kSubject ? triple.subject : triple.object;
}

std::uint64_t AnchorDecision::kept_id() const {
  return decomposed_slot() == Slot::kSubject ? triple.object : triple.subject;
}

AnchorDecision select_and_decompose(const RelationTriple& triple, const Dataset& ds,
                                    double delta) {
  if (delta < 0.0 || delta > 1.0)
    throw DataError("anchor threshold must lie in [0, 1], got " +
                    std::to_string(delta));
  const ObjectInstance& subject = ds.instance(triple.subject);
  const ObjectInstance& object = ds.instance(triple.object);

  AnchorDecision decision;
  decision.triple = triple;
  decision.iou = iou(subject.box, object.box);
  decision.subject_area = subject.box.area();
  decision.object_area = object.box.area();
  if (decision.iou < delta && decision.subject_area < decision.object_area) {
    decision.decomposed = AnchorOutcome::kSubject;
  } else if (decision.iou < delta && decision.subject_area > decision.object_area) {
    decision.decomposed = AnchorOutcome::kObject;
  } else {
    decision.decomposed = AnchorOutcome::kNotAnchor;
  }
  return decision;
}

std::vector<AnchorDecision> scan_anchors(const Dataset& ds, double delta,
                                         AnchorScanStats* stats) {
  std::vector<AnchorDecision> anchors;
  AnchorScanStats local;
  for (const auto& image : ds.images) {
    for (std::size_t t = 0; t < image.triples.size(); ++t) {
      AnchorDecision decision = select_and_decompose(image.triples[t], ds, delta);
      decision.triple_index = static_cast<int>(t);
      ++local.triples;
      if (decision.is_anchor()) {
        ++local.anchors;
        anchors.push_back(std::move(decision));
      } else if (decision.iou >= delta) {
        ++local.rejected_overlap;
      } else {
        ++local.rejected_equal_area;
      }
    }
  }
  if (stats != nullptr) *stats = local;
  return anchors;
}

}  // namespace sgdec
