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

#ifndef SGDEC_SYNTH_HPP_
#define SGDEC_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sgdec/schema.hpp"

namespace sgdec {

// Deterministic scene-graph generator with a controlled long tail.
//
// Object categories form semantic groups: word embeddings and visual
// cluster means share a group center, so categories in one group are
// mutual nearest neighbors and carry similar visual features. Every
// predicate owns a signature (subject group, object group, geometry
// archetype); planted pairs follow the signature, so the predicate is
// recoverable from category groups plus box geometry, and an instance
// swapped for a same-group instance keeps its relation valid. Predicate
// frequencies follow a Zipf law over the predicate index (1 = most
// frequent). A configurable set of (subject category, predicate, object
// category) combinations is held out of the training set and planted into
// the test set, giving the test set both seen and genuinely unseen
// combinations. Every predicate is also planted at least twice in each
// split so no class is accidentally empty.
struct SynthConfig {
  int n_train_images = 2000;
  int n_test_images = 400;
  int n_object_categories = 40;
  int n_predicates = 50;  // annotated predicates; index 0 stays reserved
  double zipf_exponent = 1.0;
  int d_visual = 64;
  int d_word = 200;
  double image_w = 640.0;
  double image_h = 480.0;
  double feature_spread = 1.0;   // per-instance visual noise
  double geometry_noise = 0.08;  // chance a planted pair ignores its archetype
  int group_size = 5;            // categories per semantic group
  int min_instances = 3;
  int max_instances = 8;
  int holdout_per_predicate = 2;   // unseen combos per tail predicate
  int predicates_with_holdout = 15;  // rarest ranks receiving holdouts
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthResult {
  Dataset train;
  Dataset test;
  std::vector<std::string> embedding_tokens;
  std::vector<std::vector<double>> embedding_vectors;
  // (subject category, predicate, object category), absent from train,
  // planted in test.
  std::vector<std::array<int, 3>> holdout_combos;
};

SynthResult generate(const SynthConfig& cfg);

}  // namespace sgdec

#endif  // SGDEC_SYNTH_HPP_
