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

#ifndef SGDEC_EVAL_HPP_
#define SGDEC_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sgdec/schema.hpp"

namespace sgdec {

struct PredictedTriple {
  std::uint64_t subject = 0;
  std::uint64_t object = 0;
  int predicate = 0;
  double score = 0.0;
};

// Per-image ranked predictions against ground truth. Predictions are sorted
// by descending score and obey the graph constraint: at most one predicate
// per ordered (subject, object) pair.
struct EvalRecord {
  int image_id = 0;
  std::vector<PredictedTriple> predictions;
  std::vector<RelationTriple> ground_truth;
};

// Enforces the EvalRecord invariants (finite scores, descending order, one
// prediction per ordered pair); throws DataError.
void validate_record(const EvalRecord& record);

// Fraction of the record's ground-truth triples found in its top-k
// predictions (exact subject id, object id, predicate match).
double recall_at_k(const EvalRecord& record, std::size_t k);

// Mean of recall_at_k over records with at least one ground-truth triple.
double overall_recall_at_k(const std::vector<EvalRecord>& records, std::size_t k);

struct PredicateRecall {
  int predicate = 0;
  std::size_t gt_count = 0;
  std::size_t hit_count = 0;
  double recall = 0.0;
};

struct MeanRecallResult {
  double mean_recall = 0.0;
  // One entry per predicate index; gt_count == 0 marks predicates absent
  // from the ground truth.
  std::vector<PredicateRecall> per_predicate;
};

// Per-predicate recall pooled across images, averaged without weighting by
// frequency. Predicates absent from the ground truth are skipped unless
// include_absent_as_zero is set.
MeanRecallResult mean_recall_at_k(const std::vector<EvalRecord>& records,
                                  std::size_t k, int n_predicates,
                                  bool include_absent_as_zero = false);

struct SplitSpec {
  enum class Kind { kFull, kFewShot, kZeroShot };
  Kind kind = Kind::kFull;
  int few_shot_s = 0;
  std::uint64_t seed = 0;
  std::vector<int> train_images;             // few-shot: selected image ids
  std::vector<RelationTriple> test_triples;  // zero-shot: evaluated triples
};

// For each predicate, uniformly samples min(s, available) images containing
// it; the union (sorted, deduplicated) is the training image set.
SplitSpec few_shot_split(const Dataset& ds, int s, std::uint64_t seed);

// Test triples whose (subject category, predicate, object category)
// combination never occurs in the training annotations.
SplitSpec zero_shot_split(const Dataset& train, const Dataset& test);

// Drops ground-truth triples outside the zero-shot selection; records left
// without ground truth stay but no longer contribute to aggregation.
std::vector<EvalRecord> restrict_to_triples(std::vector<EvalRecord> records,
                                            const std::vector<RelationTriple>& keep);

void save_split(const SplitSpec& split, const Dataset& ds, const std::string& path);
SplitSpec load_split(const std::string& path, const Dataset& ds);

}  // namespace sgdec

#endif  // SGDEC_EVAL_HPP_
