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

#ifndef SGDEC_DICTIONARY_HPP_
#define SGDEC_DICTIONARY_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgdec/schema.hpp"

namespace sgdec {

// Per-category ranking of the semantically closest other categories by
// cosine similarity of their word embeddings. Self is excluded; ties break
// toward lower category index.
struct CategoryNeighborIndex {
  std::vector<std::vector<std::pair<int, double>>> neighbors;
};

// Up to k nearest neighbor categories per category. min_cosine filters the
// candidate pool; the default keeps everything cosine can produce.
CategoryNeighborIndex build_neighbor_index(const EmbeddingTable& embeddings, int k,
                                           double min_cosine = -1.0);

// Capacity-bounded pool of visual components. When full, an insert evicts
// one uniformly random entry (seeded, so a fixed insert sequence replays
// bit-identically). Retrieval ranks candidates by box shape similarity,
// breaking ties toward the earliest-inserted entry, and never returns the
// query's own instance.
class ComponentDictionary {
 public:
  ComponentDictionary(std::size_t capacity, std::uint64_t seed);

  // Returns the evicted component when the dictionary was full.
  std::optional<VisualComponent> insert(VisualComponent component);

  // Best same-category entry by shape similarity, or nullopt.
  std::optional<VisualComponent> query_intra(const VisualComponent& u) const;

  // Best entry among u's neighbor categories, or nullopt.
  std::optional<VisualComponent> query_inter(const VisualComponent& u,
                                             const CategoryNeighborIndex& index) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Entries ordered by insertion time (survivors only); used by dict-dump.
  std::vector<const VisualComponent*> entries_by_insertion() const;

 private:
  struct Entry {
    VisualComponent component;
    std::uint64_t seq;
  };

  void drop_entry(std::size_t position);
  const Entry* best_of(const std::vector<std::uint32_t>& positions,
                       const VisualComponent& u, const Entry* incumbent) const;

  std::size_t capacity_;
  std::mt19937_64 rng_;
  std::uint64_t next_seq_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<int, std::vector<std::uint32_t>> by_category_;
};

}  // namespace sgdec

#endif  // SGDEC_DICTIONARY_HPP_
