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

#ifndef SGDEC_COMPOSER_HPP_
#define SGDEC_COMPOSER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sgdec/anchor.hpp"
#include "sgdec/dictionary.hpp"
#include "sgdec/schema.hpp"

namespace sgdec {

enum class CompositionKind { kIntra, kInter };

// An augmented relation built from an anchor triple by swapping its
// decomposed element for a retrieved component. The composed slot keeps the
// anchor element's spatial block (the replacement is placed at the original
// location) and takes the replacement's visual block and the word embedding
// of the composed slot's category; the kept element is untouched. The label
// is always the anchor's predicate.
struct ComposedRelation {
  RelationTriple anchor;
  int anchor_triple_index = 0;
  Slot decomposed_slot = Slot::kSubject;
  std::uint64_t replacement_id = 0;
  int replacement_category = -1;
  CompositionKind kind = CompositionKind::kIntra;
  int predicate_label = 0;
  std::pair<int, int> composed_categories{-1, -1};  // (subject, object)
  std::vector<double> kept_feature;
  std::vector<double> composed_feature;

  // Pair feature in classifier order [subject; object].
  std::vector<double> pair_feature() const;
};

// Builds one composed relation. Intra requires the replacement to share the
// decomposed element's category; inter requires it to differ (the caller
// retrieves it from a neighbor category).
ComposedRelation compose(const Dataset& ds, const ComponentStore& components,
                         const AnchorDecision& anchor,
                         const VisualComponent& replacement, CompositionKind kind,
                         const EmbeddingTable& embeddings);

// Re-checks every structural invariant of a composed relation against the
// dataset, component store and embeddings it was derived from.
void validate_composed(const ComposedRelation& item, const Dataset& ds,
                       const ComponentStore& components,
                       const EmbeddingTable& embeddings);

struct CorpusStats {
  std::size_t intra = 0;
  std::size_t inter = 0;
  std::size_t skipped_intra = 0;  // anchors with no same-category candidate
  std::size_t skipped_inter = 0;  // anchors with an empty neighbor pool
  std::map<int, std::size_t> per_predicate;

  std::size_t total() const { return intra + inter; }
};

struct CorpusResult {
  std::vector<ComposedRelation> items;
  CorpusStats stats;
};

// Streams over the anchors in seeded shuffled order, attempting one intra
// and one inter composition per anchor until the budget is reached.
CorpusResult compose_corpus(const Dataset& ds, const ComponentStore& components,
                            const std::vector<AnchorDecision>& anchors,
                            const ComponentDictionary& dict,
                            const CategoryNeighborIndex& index,
                            const EmbeddingTable& embeddings, std::size_t budget,
                            std::uint64_t seed);

// Corpus manifest: one line per item,
//   <image_id> <triple_index> <subject|object> <replacement_id> <intra|inter> <predicate>
// Features are re-derived on load from the dataset and embeddings.
void save_corpus(const std::vector<ComposedRelation>& items, const Dataset& ds,
                 const std::string& path);

std::vector<ComposedRelation> load_corpus(const std::string& path, const Dataset& ds,
                                          const ComponentStore& components,
                                          const EmbeddingTable& embeddings,
                                          double delta);

}  // namespace sgdec

#endif  // SGDEC_COMPOSER_HPP_
