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

#include "sgdec/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgdec/errors.hpp"
#include "sgdec/geometry.hpp"
#include "sgdec/rng.hpp"

namespace sgdec {

CategoryNeighborIndex build_neighbor_index(const EmbeddingTable& embeddings, int k,
                                           double min_cosine) {
  if (k < 1) throw DataError("neighbor count must be >= 1");
  const int n = static_cast<int>(embeddings.rows.size());

  std::vector<double> norms(n);
  for (int c = 0; c < n; ++c) {
    double sq = 0.0;
    for (const double v : embeddings.rows[c]) sq += v * v;
    if (sq == 0.0)
      throw DataError("category " + std::to_string(c) +
                      " has a zero-norm embedding");
    norms[c] = std::sqrt(sq);
  }

  CategoryNeighborIndex index;
  index.neighbors.resize(n);
  for (int c = 0; c < n; ++c) {
    std::vector<std::pair<int, double>> ranked;
    ranked.reserve(n - 1);
    for (int other = 0; other < n; ++other) {
      if (other == c) continue;
      double dot = 0.0;
      for (int d = 0; d < embeddings.dim; ++d)
        dot += embeddings.rows[c][d] * embeddings.rows[other][d];
      const double cosine = dot / (norms[c] * norms[other]);
      if (cosine >= min_cosine) ranked.emplace_back(other, cosine);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (static_cast<int>(ranked.size()) > k) ranked.resize(k);
    index.neighbors[c] = std::move(ranked);
  }
  return index;
}

ComponentDictionary::ComponentDictionary(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
  if (capacity_ == 0) throw DataError("dictionary capacity must be >= 1");
  entries_.reserve(capacity_);
}

void ComponentDictionary::drop_entry(std::size_t position) {
  const auto unlink = [this](std::size_t pos) {
    auto& slots = by_category_[entries_[pos].component.category];
    slots.erase(std::find(slots.begin(), slots.end(), static_cast<std::uint32_t>(pos)));
  };
  unlink(position);
  const std::size_t last = entries_.size() - 1;
  if (position != last) {
    unlink(last);
    entries_[position] = std::move(entries_[last]);
    by_category_[entries_[position].component.category].push_back(
        static_cast<std::uint32_t>(position));
  }
  entries_.pop_back();
}

std::optional<VisualComponent> ComponentDictionary::insert(VisualComponent component) {
  std::optional<VisualComponent> evicted;
  if (entries_.size() == capacity_) {
    const std::size_t victim = uniform_index(rng_, entries_.size());
    evicted = std::move(entries_[victim].component);
    drop_entry(victim);
  }
  const std::uint32_t position = static_cast<std::uint32_t>(entries_.size());
  by_category_[component.category].push_back(position);
  entries_.push_back(Entry{std::move(component), next_seq_++});
  return evicted;
}

const ComponentDictionary::Entry* ComponentDictionary::best_of(
    const std::vector<std::uint32_t>& positions, const VisualComponent& u,
    const Entry* incumbent) const {
  const Entry* best = incumbent;
  double best_score =
      best ? shape_similarity(u.box, best->component.box) : -1.0;
  for (const std::uint32_t pos : positions) {
    const Entry& entry = entries_[pos];
    if (entry.component.instance_id == u.instance_id) continue;
    const double score = shape_similarity(u.box, entry.component.box);
    if (best == nullptr || score > best_score ||
        (score == best_score && entry.seq < best->seq)) {
      best = &entry;
      best_score = score;
    }
  }
  return best;
}

std::optional<VisualComponent> ComponentDictionary::query_intra(
    const VisualComponent& u) const {
  const auto it = by_category_.find(u.category);
  if (it == by_category_.end()) return std::nullopt;
  const Entry* best = best_of(it->second, u, nullptr);
  if (best == nullptr) return std::nullopt;
  return best->component;
}

std::optional<VisualComponent> ComponentDictionary::query_inter(
    const VisualComponent& u, const CategoryNeighborIndex& index) const {
  if (u.category < 0 || u.category >= static_cast<int>(index.neighbors.size()))
    throw DataError("query category " + std::to_string(u.category) +
                    " outside the neighbor index");
  const Entry* best = nullptr;
  for (const auto& [category, cosine] : index.neighbors[u.category]) {
    const auto it = by_category_.find(category);
    if (it == by_category_.end()) continue;
    best = best_of(it->second, u, best);
  }
  if (best == nullptr) return std::nullopt;
  return best->component;
}

std::vector<const VisualComponent*> ComponentDictionary::entries_by_insertion() const {
  std::vector<const Entry*> ordered;
  ordered.reserve(entries_.size());
  for (const auto& entry : entries_) ordered.push_back(&entry);
  std::sort(ordered.begin(), ordered.end(),
            [](const Entry* a, const Entry* b) { return a->seq < b->seq; });
  std::vector<const VisualComponent*> out;
  out.reserve(ordered.size());
  for (const Entry* entry : ordered) out.push_back(&entry->component);
  return out;
}

}  // namespace sgdec
