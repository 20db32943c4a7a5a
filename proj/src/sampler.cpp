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

#include "sgdec/sampler.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "sgdec/errors.hpp"
#include "sgdec/rng.hpp"

namespace sgdec {

BalancedSampler::BalancedSampler(SamplerConfig config,
                                 std::vector<std::vector<int>> pools_by_predicate)
    : config_(config), pools_(std::move(pools_by_predicate)), rng_(config.seed) {
  if (config_.n_predicates < 1 || config_.k_images < 1)
    throw DataError("sampler needs N >= 1 and K >= 1");
  for (std::size_t p = 0; p < pools_.size(); ++p) {
    auto& pool = pools_[p];
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (!pool.empty()) eligible_.push_back(static_cast<int>(p));
  }
}

BalancedSampler BalancedSampler::from_data(const Dataset& ds,
                                           const std::vector<ComposedRelation>& corpus,
                                           const std::vector<int>* image_filter,
                                           SamplerConfig config) {
  std::set<int> allowed;
  if (image_filter != nullptr) allowed.insert(image_filter->begin(), image_filter->end());
  const auto admitted = [&](int image_id) {
    return image_filter == nullptr || allowed.count(image_id) > 0;
  };

  std::vector<std::vector<int>> pools(ds.vocab.predicates.size());
  for (const auto& image : ds.images) {
    if (!admitted(image.image_id)) continue;
    for (const auto& triple : image.triples)
      pools[triple.predicate].push_back(image.image_id);
  }
  for (const auto& item : corpus) {
    if (!admitted(item.anchor.image_id)) continue;
    pools[item.predicate_label].push_back(item.anchor.image_id);
  }
  return BalancedSampler(config, std::move(pools));
}

const std::vector<int>& BalancedSampler::pool(int predicate) const {
  if (predicate < 0 || predicate >= static_cast<int>(pools_.size()))
    throw DataError("no pool for predicate " + std::to_string(predicate));
  return pools_[predicate];
}

std::vector<std::pair<int, std::vector<int>>> BalancedSampler::next_batch() {
  const std::size_t n = static_cast<std::size_t>(config_.n_predicates);
  if (eligible_.size() < n)
    throw DataError("balanced sampler needs at least " + std::to_string(n) +
                    " predicates with images, found " +
                    std::to_string(eligible_.size()));

  const std::vector<int> predicates = sample_without_replacement(eligible_, n, rng_);
  std::vector<std::pair<int, std::vector<int>>> batch;
  batch.reserve(n);
  for (const int predicate : predicates) {
    const auto& pool = pools_[predicate];
    const std::size_t k = static_cast<std::size_t>(config_.k_images);
    std::vector<int> images;
    if (pool.size() >= k) {
      images = sample_without_replacement(pool, k, rng_);
    } else {
      images.reserve(k);
      for (std::size_t i = 0; i < k; ++i)
        images.push_back(pool[uniform_index(rng_, pool.size())]);
    }
    batch.emplace_back(predicate, std::move(images));
  }
  return batch;
}

}  // namespace sgdec
