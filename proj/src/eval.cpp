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

#include "sgdec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "sgdec/errors.hpp"
#include "sgdec/rng.hpp"

namespace sgdec {

namespace {

using TripleKey = std::tuple<std::uint64_t, std::uint64_t, int>;
using ComboKey = std::tuple<int, int, int>;  // subject cat, predicate, object cat

ComboKey combo_of(const RelationTriple& triple, const Dataset& ds) {
  return {ds.instance(triple.subject).category, triple.predicate,
          ds.instance(triple.object).category};
}

}  // namespace

void validate_record(const EvalRecord& record) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& prediction : record.predictions) {
    if (!std::isfinite(prediction.score))
      throw DataError("non-finite prediction score in image " +
                      std::to_string(record.image_id));
    if (prediction.score > previous)
      throw DataError("predictions not sorted by descending score in image " +
                      std::to_string(record.image_id));
    previous = prediction.score;
    if (!pairs.emplace(prediction.subject, prediction.object).second)
      throw DataError("multiple predicates predicted for one pair in image " +
                      std::to_string(record.image_id));
  }
}

double recall_at_k(const EvalRecord& record, std::size_t k) {
  if (record.ground_truth.empty()) return 0.0;
  std::set<TripleKey> top;
  const std::size_t limit = std::min(k, record.predictions.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& p = record.predictions[i];
    top.emplace(p.subject, p.object, p.predicate);
  }
  std::size_t hits = 0;
  for (const auto& gt : record.ground_truth)
    if (top.count({gt.subject, gt.object, gt.predicate})) ++hits;
  return static_cast<double>(hits) / static_cast<double>(record.ground_truth.size());
}

double overall_recall_at_k(const std::vector<EvalRecord>& records, std::size_t k) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& record : records) {
    if (record.ground_truth.empty()) continue;
    sum += recall_at_k(record, k);
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

MeanRecallResult mean_recall_at_k(const std::vector<EvalRecord>& records,
                                  std::size_t k, int n_predicates,
                                  bool include_absent_as_zero) {
  MeanRecallResult result;
  result.per_predicate.resize(n_predicates);
  for (int p = 0; p < n_predicates; ++p) result.per_predicate[p].predicate = p;

  for (const auto& record : records) {
    std::set<TripleKey> top;
    const std::size_t limit = std::min(k, record.predictions.size());
    for (std::size_t i = 0; i < limit; ++i) {
      const auto& p = record.predictions[i];
      top.emplace(p.subject, p.object, p.predicate);
    }
    for (const auto& gt : record.ground_truth) {
      if (gt.predicate < 0 || gt.predicate >= n_predicates)
        throw DataError("ground-truth predicate outside the vocabulary");
      auto& slot = result.per_predicate[gt.predicate];
      ++slot.gt_count;
      if (top.count({gt.subject, gt.object, gt.predicate})) ++slot.hit_count;
    }
  }

  double sum = 0.0;
  std::size_t counted = 0;
  for (int p = 1; p < n_predicates; ++p) {
    auto& slot = result.per_predicate[p];
    if (slot.gt_count > 0) {
      slot.recall = static_cast<double>(slot.hit_count) /
                    static_cast<double>(slot.gt_count);
      sum += slot.recall;
      ++counted;
    } else if (include_absent_as_zero) {
      ++counted;
    }
  }
  result.mean_recall = counted == 0 ? 0.0 : sum / static_cast<double>(counted);
  return result;
}

SplitSpec few_shot_split(const Dataset& ds, int s, std::uint64_t seed) {
  if (s < 1) throw DataError("few-shot S must be >= 1");
  const int n_predicates = static_cast<int>(ds.vocab.predicates.size());

  std::vector<std::vector<int>> images_with(n_predicates);
  for (const auto& image : ds.images) {
    std::set<int> present;
    for (const auto& triple : image.triples) present.insert(triple.predicate);
    for (const int p : present) images_with[p].push_back(image.image_id);
  }

  std::mt19937_64 rng(mix_seed(seed, 0xF5));
  std::set<int> selected;
  for (int p = 1; p < n_predicates; ++p) {
    auto& pool = images_with[p];
    std::sort(pool.begin(), pool.end());
    const std::size_t take = std::min<std::size_t>(pool.size(), s);
    if (take == 0) continue;
    for (const int image_id : sample_without_replacement(pool, take, rng))
      selected.insert(image_id);
  }

  SplitSpec split;
  split.kind = SplitSpec::Kind::kFewShot;
  split.few_shot_s = s;
  split.seed = seed;
  split.train_images.assign(selected.begin(), selected.end());
  return split;
}

SplitSpec zero_shot_split(const Dataset& train, const Dataset& test) {
  if (!(train.vocab == test.vocab))
    throw DataError("zero-shot split needs a shared vocabulary");

  std::set<ComboKey> seen;
  for (const auto& image : train.images)
    for (const auto& triple : image.triples) seen.insert(combo_of(triple, train));

  SplitSpec split;
  split.kind = SplitSpec::Kind::kZeroShot;
  for (const auto& image : test.images)
    for (const auto& triple : image.triples)
      if (!seen.count(combo_of(triple, test))) split.test_triples.push_back(triple);
  return split;
}

std::vector<EvalRecord> restrict_to_triples(std::vector<EvalRecord> records,
                                            const std::vector<RelationTriple>& keep) {
  std::set<std::tuple<int, std::uint64_t, std::uint64_t, int>> allowed;
  for (const auto& triple : keep)
    allowed.emplace(triple.image_id, triple.subject, triple.object, triple.predicate);
  for (auto& record : records) {
    std::vector<RelationTriple> kept;
    for (const auto& gt : record.ground_truth)
      if (allowed.count({record.image_id, gt.subject, gt.object, gt.predicate}))
        kept.push_back(gt);
    record.ground_truth = std::move(kept);
  }
  return records;
}

void save_split(const SplitSpec& split, const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write split file " + path);
  out << "sgds 1\n";
  switch (split.kind) {
    case SplitSpec::Kind::kFewShot:
      out << "kind few-shot\n";
      out << "s " << split.few_shot_s << "\n";
      out << "seed " << split.seed << "\n";
      for (const int image_id : split.train_images) out << "image " << image_id << "\n";
      break;
    case SplitSpec::Kind::kZeroShot:
      out << "kind zero-shot\n";
      for (const auto& triple : split.test_triples)
        out << "triple " << triple.image_id << " " << triple.subject << " "
            << triple.object << " " << ds.vocab.predicates[triple.predicate] << "\n";
      break;
    case SplitSpec::Kind::kFull:
      out << "kind full\n";
      break;
  }
  if (!out) throw DataError("failed writing split file " + path);
}

SplitSpec load_split(const std::string& path, const Dataset& ds) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file " + path);
  SplitSpec split;
  std::string line;
  int line_no = 0;
  bool saw_header = false, saw_kind = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string kind;
    if (!(tokens >> kind) || kind[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (!saw_header) {
      std::string version;
      if (kind != "sgds" || !(tokens >> version) || version != "1")
        throw DataError(where + ": expected header 'sgds 1'");
      saw_header = true;
      continue;
    }
    if (kind == "kind") {
      std::string value;
      tokens >> value;
      if (value == "few-shot") {
        split.kind = SplitSpec::Kind::kFewShot;
      } else if (value == "zero-shot") {
        split.kind = SplitSpec::Kind::kZeroShot;
      } else if (value == "full") {
        split.kind = SplitSpec::Kind::kFull;
      } else {
        throw DataError(where + ": unknown split kind '" + value + "'");
      }
      saw_kind = true;
    } else if (kind == "s") {
      tokens >> split.few_shot_s;
    } else if (kind == "seed") {
      tokens >> split.seed;
    } else if (kind == "image") {
      int image_id = 0;
      if (!(tokens >> image_id)) throw DataError(where + ": malformed image line");
      split.train_images.push_back(image_id);
    } else if (kind == "triple") {
      RelationTriple triple;
      std::string word, predicate_name;
      if (!(tokens >> triple.image_id >> triple.subject >> triple.object))
        throw DataError(where + ": malformed triple line");
      while (tokens >> word) {
        if (!predicate_name.empty()) predicate_name += ' ';
        predicate_name += word;
      }
      triple.predicate = ds.vocab.predicate_index(predicate_name);
      if (triple.predicate < 0)
        throw DataError(where + ": unknown predicate '" + predicate_name + "'");
      split.test_triples.push_back(triple);
    } else {
      throw DataError(where + ": unknown record kind '" + kind + "'");
    }
  }
  if (!saw_header) throw DataError(path + ": missing 'sgds 1' header");
  if (!saw_kind) throw DataError(path + ": missing 'kind' line");
  return split;
}

}  // namespace sgdec
