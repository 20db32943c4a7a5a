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

#ifndef SGDEC_SAMPLER_HPP_
#define SGDEC_SAMPLER_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "sgdec/composer.hpp"
#include "sgdec/schema.hpp"

namespace sgdec {

struct SamplerConfig {
  int n_predicates = 5;  // distinct predicates per batch
  int k_images = 1;      // images per predicate
  std::uint64_t seed = 0;
};

// Predicate-first balanced batch sampling: each batch draws N distinct
// predicates uniformly from those with non-empty image pools, then K images
// per predicate (without replacement, or with replacement when the pool is
// smaller than K). Batch size is always N*K images, so every predicate is
// sampled at the same long-run rate regardless of its frequency.
class BalancedSampler {
 public:
  // pools_by_predicate[p] lists the images containing predicate p; pools are
  // sorted and deduplicated internally.
  BalancedSampler(SamplerConfig config,
                  std::vector<std::vector<int>> pools_by_predicate);

  // Pools from a dataset plus an optional composed corpus: an image enters a
  // predicate's pool when it holds at least one real or composed triple of
  // that predicate. image_filter (when non-null) restricts to those images.
  static BalancedSampler from_data(const Dataset& ds,
                                   const std::vector<ComposedRelation>& corpus,
                                   const std::vector<int>* image_filter,
                                   SamplerConfig config);

  // N (predicate, images) picks; throws DataError when fewer than N
  // predicates are eligible.
  std::vector<std::pair<int, std::vector<int>>> next_batch();

  const std::vector<int>& eligible_predicates() const { return eligible_; }
  const std::vector<int>& pool(int predicate) const;

 private:
  SamplerConfig config_;
  std::vector<std::vector<int>> pools_;
  std::vector<int> eligible_;
  std::mt19937_64 rng_;
};

}  // namespace sgdec

#endif  // SGDEC_SAMPLER_HPP_
