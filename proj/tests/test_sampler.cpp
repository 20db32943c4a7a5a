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

#include <doctest.h>

#include <cmath>
#include <set>

#include "sgdec/errors.hpp"
#include "testutil.hpp"

namespace sgdec {
namespace {

std::vector<std::vector<int>> toy_pools(int n_predicates, int images_per_pool) {
  std::vector<std::vector<int>> pools(n_predicates + 1);  // slot 0 stays empty
  for (int p = 1; p <= n_predicates; ++p)
    for (int i = 0; i < images_per_pool; ++i) pools[p].push_back(100 * p + i);
  return pools;
}

TEST_SUITE("sampler") {

TEST_CASE("batch size is N distinct predicates times K images") {
  BalancedSampler sampler({5, 1, 42}, toy_pools(20, 4));
  const auto batch = sampler.next_batch();
  REQUIRE(batch.size() == 5);
  std::set<int> predicates;
  std::size_t images = 0;
  for (const auto& [predicate, ids] : batch) {
    predicates.insert(predicate);
    images += ids.size();
    CHECK(ids.size() == 1);
  }
  CHECK(predicates.size() == 5);  // no repeats within a batch
  CHECK(images == 5);
}

TEST_CASE("N equal to the predicate count touches every predicate once") {
  BalancedSampler sampler({6, 2, 7}, toy_pools(6, 3));
  const auto batch = sampler.next_batch();
  std::set<int> predicates;
  for (const auto& [predicate, ids] : batch) {
    predicates.insert(predicate);
    CHECK(ids.size() == 2);
  }
  CHECK(predicates == std::set<int>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("fewer than N eligible predicates is a configuration error") {
  BalancedSampler sampler({5, 1, 0}, toy_pools(3, 2));
  CHECK_THROWS_WITH_AS(sampler.next_batch(), doctest::Contains("at least 5"),
                       DataError);
}

TEST_CASE("pools smaller than K sample with replacement, larger without") {
  std::vector<std::vector<int>> pools(3);
  pools[1] = {10, 11};           // smaller than K = 3
  pools[2] = {20, 21, 22, 23};   // larger than K
  BalancedSampler sampler({2, 3, 9}, pools);
  const auto batch = sampler.next_batch();
  for (const auto& [predicate, ids] : batch) {
    REQUIRE(ids.size() == 3);
    if (predicate == 1) {
      for (const int id : ids) CHECK((id == 10 || id == 11));
    } else {
      std::set<int> unique(ids.begin(), ids.end());
      CHECK(unique.size() == 3);  // without replacement
    }
  }
}

TEST_CASE("identical seeds replay identical batches") {
  const auto run = [](std::uint64_t seed) {
    BalancedSampler sampler({4, 2, seed}, toy_pools(10, 5));
    std::vector<std::pair<int, std::vector<int>>> all;
    for (int i = 0; i < 50; ++i)
      for (auto& pick : sampler.next_batch()) all.push_back(pick);
    return all;
  };
  CHECK(run(31) == run(31));
  CHECK(run(31) != run(32));
}

TEST_CASE("pools come from real and composed triples, filtered by image") {
  Dataset ds = test::make_dataset(
      test::small_vocab(2, 3),
      {test::make_image(1, 100, 100,
                        {{1, 0, BoundingBox(0, 0, 5, 5), {}},
                         {2, 1, BoundingBox(20, 20, 40, 40), {}}},
                        {{1, 1, 2}}),
       test::make_image(2, 100, 100,
                        {{3, 0, BoundingBox(0, 0, 5, 5), {}},
                         {4, 1, BoundingBox(20, 20, 40, 40), {}}},
                        {{3, 2, 4}})});

  // A composed triple adds predicate 3 to image 2's pool.
  ComposedRelation composed;
  composed.anchor = ds.images[1].triples[0];
  composed.anchor.predicate = 3;
  composed.predicate_label = 3;

  BalancedSampler sampler = BalancedSampler::from_data(
      ds, {composed}, nullptr, SamplerConfig{1, 1, 0});
  CHECK(sampler.pool(1) == std::vector<int>{1});
  CHECK(sampler.pool(2) == std::vector<int>{2});
  CHECK(sampler.pool(3) == std::vector<int>{2});

  const std::vector<int> filter{1};
  BalancedSampler filtered = BalancedSampler::from_data(
      ds, {composed}, &filter, SamplerConfig{1, 1, 0});
  CHECK(filtered.pool(1) == std::vector<int>{1});
  CHECK(filtered.pool(2).empty());
  CHECK(filtered.pool(3).empty());
  CHECK(filtered.eligible_predicates() == std::vector<int>{1});
}

TEST_CASE("long-run predicate frequency is uniform over eligible predicates") {
  const int n_predicates = 12;
  const int n_batches = 50000;
  const int n = 5;
  BalancedSampler sampler({n, 1, 1234}, toy_pools(n_predicates, 3));

  std::vector<int> hits(n_predicates + 1, 0);
  for (int i = 0; i < n_batches; ++i)
    for (const auto& [predicate, ids] : sampler.next_batch()) ++hits[predicate];

  // Each predicate enters a batch with probability n / n_predicates; a
  // binomial count stays within 3 sigma.
  const double p = static_cast<double>(n) / n_predicates;
  const double mean = n_batches * p;
  const double sigma = std::sqrt(n_batches * p * (1.0 - p));
  for (int predicate = 1; predicate <= n_predicates; ++predicate) {
    CHECK(std::abs(hits[predicate] - mean) <= 3.0 * sigma);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace sgdec
