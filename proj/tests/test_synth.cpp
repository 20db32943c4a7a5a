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

#include "sgdec/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "sgdec/errors.hpp"
#include "testutil.hpp"

namespace sgdec {
namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.n_train_images = 300;
  cfg.n_test_images = 60;
  cfg.n_object_categories = 12;
  cfg.n_predicates = 10;
  cfg.group_size = 3;
  cfg.d_visual = 6;
  cfg.d_word = 8;
  cfg.predicates_with_holdout = 4;
  cfg.holdout_per_predicate = 2;
  cfg.seed = 77;
  return cfg;
}

std::map<int, std::size_t> predicate_histogram(const Dataset& ds) {
  std::map<int, std::size_t> counts;
  for (const auto& image : ds.images)
    for (const auto& triple : image.triples) ++counts[triple.predicate];
  return counts;
}

std::set<std::tuple<int, int, int>> combos_of(const Dataset& ds) {
  std::set<std::tuple<int, int, int>> combos;
  for (const auto& image : ds.images)
    for (const auto& triple : image.triples)
      combos.emplace(ds.instance(triple.subject).category, triple.predicate,
                     ds.instance(triple.object).category);
  return combos;
}

TEST_SUITE("synth") {

TEST_CASE("generation is reproducible and byte-identical through the writers") {
  const SynthConfig cfg = small_config();
  const SynthResult a = generate(cfg);
  const SynthResult b = generate(cfg);

  test::TempDir dir;
  save_dataset(a.train, dir.file("a_train.sgda"));
  save_dataset(b.train, dir.file("b_train.sgda"));
  save_dataset(a.test, dir.file("a_test.sgda"));
  save_dataset(b.test, dir.file("b_test.sgda"));
  save_features(a.train, dir.file("a.vcf"), cfg.d_visual);
  save_features(b.train, dir.file("b.vcf"), cfg.d_visual);
  save_embedding_file(dir.file("a_emb.txt"), a.embedding_tokens,
                      a.embedding_vectors);
  save_embedding_file(dir.file("b_emb.txt"), b.embedding_tokens,
                      b.embedding_vectors);

  CHECK(test::read_bytes(dir.file("a_train.sgda")) ==
        test::read_bytes(dir.file("b_train.sgda")));
  CHECK(test::read_bytes(dir.file("a_test.sgda")) ==
        test::read_bytes(dir.file("b_test.sgda")));
  CHECK(test::read_bytes(dir.file("a.vcf")) == test::read_bytes(dir.file("b.vcf")));
  CHECK(test::read_bytes(dir.file("a_emb.txt")) ==
        test::read_bytes(dir.file("b_emb.txt")));

  SynthConfig other = cfg;
  other.seed = 78;
  const SynthResult c = generate(other);
  test::TempDir dir2;
  save_dataset(c.train, dir2.file("c_train.sgda"));
  CHECK(test::read_bytes(dir.file("a_train.sgda")) !=
        test::read_bytes(dir2.file("c_train.sgda")));
}

TEST_CASE("generated data passes schema validation and loads back") {
  const SynthConfig cfg = small_config();
  const SynthResult result = generate(cfg);
  const FeatureDims dims{cfg.d_visual, kSpatialDim, cfg.d_word};
  CHECK_NOTHROW(result.train.validate(&dims));
  CHECK_NOTHROW(result.test.validate(&dims));

  test::TempDir dir;
  save_dataset(result.train, dir.file("train.sgda"));
  save_features(result.train, dir.file("train.vcf"), cfg.d_visual);
  save_embedding_file(dir.file("emb.txt"), result.embedding_tokens,
                      result.embedding_vectors);
  const Dataset loaded =
      load_dataset(dir.file("train.sgda"), dir.file("train.vcf"), dims);
  CHECK(loaded.images.size() == result.train.images.size());
  CHECK(loaded.triple_count() == result.train.triple_count());
  const EmbeddingTable table = load_embeddings(dir.file("emb.txt"), loaded.vocab);
  CHECK(table.dim == cfg.d_word);
  CHECK_NOTHROW(assemble_all(loaded, table, dims));

  // 3 to 8 instances per image, at least one triple.
  for (const auto& image : result.train.images) {
    CHECK(image.instances.size() >= 3);
    CHECK(image.instances.size() <= 8);
    CHECK(!image.triples.empty());
  }
}

TEST_CASE("every predicate occurs in both splits") {
  const SynthResult result = generate(small_config());
  const auto train_hist = predicate_histogram(result.train);
  const auto test_hist = predicate_histogram(result.test);
  for (int p = 1; p <= 10; ++p) {
    CHECK(train_hist.count(p));
    CHECK(test_hist.count(p));
  }
}

TEST_CASE("zipf exponent zero gives approximately uniform counts") {
  SynthConfig cfg = small_config();
  cfg.zipf_exponent = 0.0;
  cfg.n_train_images = 800;
  const SynthResult result = generate(cfg);
  const auto hist = predicate_histogram(result.train);

  std::size_t total = 0;
  for (const auto& [predicate, count] : hist) total += count;
  const double expected = static_cast<double>(total) / cfg.n_predicates;
  double chi2 = 0.0;
  for (int p = 1; p <= cfg.n_predicates; ++p) {
    const double observed = hist.count(p) ? static_cast<double>(hist.at(p)) : 0.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  // 9 degrees of freedom; the 0.999 quantile is 27.9.
  CHECK(chi2 < 27.9);
}

TEST_CASE("frequency histogram follows the configured zipf law") {
  SynthConfig cfg = small_config();
  cfg.zipf_exponent = 1.0;
  cfg.n_train_images = 1200;
  const SynthResult result = generate(cfg);
  const auto hist = predicate_histogram(result.train);

  std::size_t total = 0;
  for (const auto& [predicate, count] : hist) total += count;

  double norm = 0.0;
  for (int k = 1; k <= cfg.n_predicates; ++k) norm += 1.0 / k;
  double chi2 = 0.0;
  for (int p = 1; p <= cfg.n_predicates; ++p) {
    const double expected = total * (1.0 / p) / norm;
    const double observed = hist.count(p) ? static_cast<double>(hist.at(p)) : 0.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  CHECK(chi2 < 27.9);

  // The head outweighs the tail by roughly the configured ratio.
  CHECK(hist.at(1) > 3 * hist.at(cfg.n_predicates));
}

TEST_CASE("held-out combinations appear in test and never in train") {
  const SynthConfig cfg = small_config();
  const SynthResult result = generate(cfg);
  REQUIRE(result.holdout_combos.size() ==
          static_cast<std::size_t>(cfg.predicates_with_holdout *
                                   cfg.holdout_per_predicate));

  const auto train_combos = combos_of(result.train);
  const auto test_combos = combos_of(result.test);
  for (const auto& combo : result.holdout_combos) {
    const auto key = std::make_tuple(combo[0], combo[1], combo[2]);
    CHECK(train_combos.count(key) == 0);
    CHECK(test_combos.count(key) == 1);
  }
}

TEST_CASE("infeasible holdout configuration is rejected") {
  SynthConfig cfg = small_config();
  cfg.group_size = 2;
  cfg.holdout_per_predicate = 4;  // grid of 2x2 leaves nothing to train on
  CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("held-out"), DataError);
}

TEST_CASE("invalid configurations are rejected") {
  SynthConfig cfg = small_config();
  cfg.min_instances = 1;
  CHECK_THROWS_AS(generate(cfg), DataError);

  cfg = small_config();
  cfg.n_predicates = 1000;  // more signatures than tuples exist
  CHECK_THROWS_AS(generate(cfg), DataError);

  cfg = small_config();
  cfg.zipf_exponent = -1.0;
  CHECK_THROWS_AS(generate(cfg), DataError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace sgdec
