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

#include "sgdec/composer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sgdec/errors.hpp"
#include "sgdec/rng.hpp"

namespace sgdec {

namespace {

bool block_equal(const std::vector<double>& a, std::size_t a_offset,
                 const std::vector<double>& b, std::size_t b_offset,
                 std::size_t width) {
  for (std::size_t i = 0; i < width; ++i)
    if (a[a_offset + i] != b[b_offset + i]) return false;
  return true;
}

const RelationTriple& resolve_anchor_triple(const ComposedRelation& item,
                                            const Dataset& ds) {
  const ImageRecord* image = ds.find_image(item.anchor.image_id);
  if (image == nullptr)
    throw DataError("composed relation references unknown image " +
                    std::to_string(item.anchor.image_id));
  if (item.anchor_triple_index < 0 ||
      item.anchor_triple_index >= static_cast<int>(image->triples.size()))
    throw DataError("composed relation references triple index " +
                    std::to_string(item.anchor_triple_index) + " outside image " +
                    std::to_string(item.anchor.image_id));
  const RelationTriple& triple = image->triples[item.anchor_triple_index];
  if (!(triple == item.anchor))
    throw DataError("composed relation anchor does not match the annotations");
  return triple;
}

}  // namespace

std::vector<double> ComposedRelation::pair_feature() const {
  std::vector<double> pair;
  pair.reserve(kept_feature.size() + composed_feature.size());
  const std::vector<double>& subject =
      decomposed_slot == Slot::kSubject ? composed_feature : kept_feature;
  const std::vector<double>& object =
      decomposed_slot == Slot::kSubject ? kept_feature : composed_feature;
  pair.insert(pair.end(), subject.begin(), subject.end());
  pair.insert(pair.end(), object.begin(), object.end());
  return pair;
}

ComposedRelation compose(const Dataset& ds, const ComponentStore& components,
                         const AnchorDecision& anchor,
                         const VisualComponent& replacement, CompositionKind kind,
                         const EmbeddingTable& embeddings) {
  const Slot slot = anchor.decomposed_slot();  // rejects non-anchors
  const VisualComponent& u = components.of(anchor.decomposed_id());
  const VisualComponent& kept = components.of(anchor.kept_id());

  if (kind == CompositionKind::kIntra && replacement.category != u.category)
    throw DataError("intra-class composition requires the replacement to share "
                    "category " +
                    std::to_string(u.category));
  if (kind == CompositionKind::kInter && replacement.category == u.category)
    throw DataError("inter-class composition requires a different category than " +
                    std::to_string(u.category));

  const FeatureDims& dims = components.dims();
  const std::vector<double>& word = embeddings.of(replacement.category);
  if (static_cast<int>(word.size()) != dims.word)
    throw DataError("embedding width does not match the component layout");

  ComposedRelation item;
  item.anchor = anchor.triple;
  item.anchor_triple_index = anchor.triple_index;
  item.decomposed_slot = slot;
  item.replacement_id = replacement.instance_id;
  item.replacement_category = replacement.category;
  item.kind = kind;
  item.predicate_label = anchor.triple.predicate;
  item.composed_categories =
      slot == Slot::kSubject
          ? std::make_pair(replacement.category, kept.category)
          : std::make_pair(kept.category, replacement.category);
  item.kept_feature = kept.feature;

  item.composed_feature.reserve(dims.component());
  item.composed_feature.insert(item.composed_feature.end(),
                               replacement.feature.begin(),
                               replacement.feature.begin() + dims.visual);
  item.composed_feature.insert(item.composed_feature.end(),
                               u.feature.begin() + dims.visual,
                               u.feature.begin() + dims.visual + dims.spatial);
  item.composed_feature.insert(item.composed_feature.end(), word.begin(), word.end());
  return item;
}

void validate_composed(const ComposedRelation& item, const Dataset& ds,
                       const ComponentStore& components,
                       const EmbeddingTable& embeddings) {
  const RelationTriple& triple = resolve_anchor_triple(item, ds);
  if (item.predicate_label != triple.predicate)
    throw DataError("composed relation label differs from its anchor predicate");

  const std::uint64_t decomposed_id =
      item.decomposed_slot == Slot::kSubject ? triple.subject : triple.object;
  const std::uint64_t kept_id =
      item.decomposed_slot == Slot::kSubject ? triple.object : triple.subject;
  const VisualComponent& u = components.of(decomposed_id);
  const VisualComponent& kept = components.of(kept_id);
  const VisualComponent& replacement = components.of(item.replacement_id);

  if (replacement.category != item.replacement_category)
    throw DataError("composed relation records the wrong replacement category");
  if (item.kind == CompositionKind::kIntra) {
    if (replacement.category != u.category)
      throw DataError("intra-class item with a category change");
  } else if (replacement.category == u.category) {
    throw DataError("inter-class item without a category change");
  }

  const auto expected_categories =
      item.decomposed_slot == Slot::kSubject
          ? std::make_pair(replacement.category, kept.category)
          : std::make_pair(kept.category, replacement.category);
  if (item.composed_categories != expected_categories)
    throw DataError("composed categories do not match the slot replacement");

  const FeatureDims& dims = components.dims();
  const std::size_t d_v = dims.visual, d_s = dims.spatial, d_w = dims.word;
  if (item.kept_feature != kept.feature)
    throw DataError("kept element feature was altered by composition");
  if (item.composed_feature.size() != d_v + d_s + d_w)
    throw DataError("composed feature has the wrong width");
  if (!block_equal(item.composed_feature, 0, replacement.feature, 0, d_v))
    throw DataError("composed visual block does not come from the replacement");
  if (!block_equal(item.composed_feature, d_v, u.feature, d_v, d_s))
    throw DataError("composed spatial block does not come from the anchor element");
  const std::vector<double>& word = embeddings.of(replacement.category);
  if (!block_equal(item.composed_feature, d_v + d_s, word, 0, d_w))
    throw DataError("composed word block does not match the slot category");
}

CorpusResult compose_corpus(const Dataset& ds, const ComponentStore& components,
                            const std::vector<AnchorDecision>& anchors,
                            const ComponentDictionary& dict,
                            const CategoryNeighborIndex& index,
                            const EmbeddingTable& embeddings, std::size_t budget,
                            std::uint64_t seed) {
  CorpusResult result;
  if (budget == 0) return result;

  std::vector<std::size_t> order(anchors.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(mix_seed(seed, 0xC0));
  shuffle_vec(order, rng);

  for (const std::size_t i : order) {
    const AnchorDecision& anchor = anchors[i];
    const VisualComponent& u = components.of(anchor.decomposed_id());

    if (result.items.size() >= budget) break;
    if (const auto match = dict.query_intra(u)) {
      result.items.push_back(compose(ds, components, anchor, *match,
                                     CompositionKind::kIntra, embeddings));
      ++result.stats.intra;
      ++result.stats.per_predicate[anchor.triple.predicate];
    } else {
      ++result.stats.skipped_intra;
    }

    if (result.items.size() >= budget) break;
    if (const auto match = dict.query_inter(u, index)) {
      result.items.push_back(compose(ds, components, anchor, *match,
                                     CompositionKind::kInter, embeddings));
      ++result.stats.inter;
      ++result.stats.per_predicate[anchor.triple.predicate];
    } else {
      ++result.stats.skipped_inter;
    }
  }
  return result;
}

void save_corpus(const std::vector<ComposedRelation>& items, const Dataset& ds,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path);
  out << "sgdc 1\n";
  for (const auto& item : items) {
    out << item.anchor.image_id << " " << item.anchor_triple_index << " "
        << (item.decomposed_slot == Slot::kSubject ? "subject" : "object") << " "
        << item.replacement_id << " "
        << (item.kind == CompositionKind::kIntra ? "intra" : "inter") << " "
        << ds.vocab.predicates[item.predicate_label] << "\n";
  }
  if (!out) throw DataError("failed writing corpus file " + path);
}

std::vector<ComposedRelation> load_corpus(const std::string& path, const Dataset& ds,
                                          const ComponentStore& components,
                                          const EmbeddingTable& embeddings,
                                          double delta) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);

  std::vector<ComposedRelation> items;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first) || first[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (!saw_header) {
      std::string version;
      if (first != "sgdc" || !(tokens >> version) || version != "1")
        throw DataError(where + ": expected header 'sgdc 1'");
      saw_header = true;
      continue;
    }

    int image_id = 0, triple_index = 0;
    std::string slot_name, kind_name, predicate_name, word;
    std::uint64_t replacement_id = 0;
    std::istringstream image_tok(first);
    if (!(image_tok >> image_id) ||
        !(tokens >> triple_index >> slot_name >> replacement_id >> kind_name))
      throw DataError(where + ": malformed corpus record");
    while (tokens >> word) {
      if (!predicate_name.empty()) predicate_name += ' ';
      predicate_name += word;
    }
    if (predicate_name.empty()) throw DataError(where + ": missing predicate");

    const ImageRecord* image = ds.find_image(image_id);
    if (image == nullptr)
      throw DataError(where + ": unknown image id " + std::to_string(image_id));
    if (triple_index < 0 || triple_index >= static_cast<int>(image->triples.size()))
      throw DataError(where + ": triple index out of range");

    AnchorDecision decision =
        select_and_decompose(image->triples[triple_index], ds, delta);
    decision.triple_index = triple_index;
    if (!decision.is_anchor())
      throw DataError(where + ": recorded anchor no longer qualifies at delta " +
                      std::to_string(delta));
    const std::string expected_slot =
        decision.decomposed_slot() == Slot::kSubject ? "subject" : "object";
    if (slot_name != expected_slot)
      throw DataError(where + ": recorded slot '" + slot_name +
                      "' is inconsistent with the annotations");
    if (ds.vocab.predicates[decision.triple.predicate] != predicate_name)
      throw DataError(where + ": recorded label '" + predicate_name +
                      "' is inconsistent with the annotations");

    CompositionKind kind;
    if (kind_name == "intra") {
      kind = CompositionKind::kIntra;
    } else if (kind_name == "inter") {
      kind = CompositionKind::kInter;
    } else {
      throw DataError(where + ": unknown composition kind '" + kind_name + "'");
    }
    items.push_back(compose(ds, components, decision,
                            components.of(replacement_id), kind, embeddings));
  }
  if (!saw_header) throw DataError(path + ": missing 'sgdc 1' header");
  return items;
}

}  // namespace sgdec
