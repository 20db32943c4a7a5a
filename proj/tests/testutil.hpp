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

#ifndef SGDEC_TESTS_TESTUTIL_HPP_
#define SGDEC_TESTS_TESTUTIL_HPP_

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sgdec/schema.hpp"

namespace sgdec::test {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const int id = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("sgdec_test_" + std::to_string(::getpid()) + "_" + std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Tiny vocabulary and dataset builders for targeted cases.
inline CategoryVocab small_vocab(int n_objects, int n_predicates) {
  CategoryVocab vocab;
  for (int c = 0; c < n_objects; ++c)
    vocab.object_categories.push_back("cat" + std::to_string(c));
  vocab.predicates.push_back("none");
  for (int p = 1; p <= n_predicates; ++p)
    vocab.predicates.push_back("pred" + std::to_string(p));
  return vocab;
}

struct InstanceSpec {
  std::uint64_t id;
  int category;
  BoundingBox box;
  std::vector<float> visual;
};

struct TripleSpec {
  std::uint64_t subject;
  int predicate;
  std::uint64_t object;
};

inline ImageRecord make_image(int image_id, double w, double h,
                              const std::vector<InstanceSpec>& instances,
                              const std::vector<TripleSpec>& triples) {
  ImageRecord image;
  image.image_id = image_id;
  image.width = w;
  image.height = h;
  for (const auto& spec : instances) {
    ObjectInstance inst;
    inst.instance_id = spec.id;
    inst.image_id = image_id;
    inst.category = spec.category;
    inst.box = spec.box;
    inst.visual_feature = spec.visual;
    image.instances.push_back(std::move(inst));
  }
  for (const auto& spec : triples)
    image.triples.push_back(
        RelationTriple{image_id, spec.subject, spec.object, spec.predicate});
  return image;
}

inline Dataset make_dataset(CategoryVocab vocab, std::vector<ImageRecord> images) {
  Dataset ds;
  ds.vocab = std::move(vocab);
  ds.images = std::move(images);
  ds.reindex();
  return ds;
}

// Constant-per-category embeddings: category c gets basis-like vector with
// 1 + c/10 in slot (c % dim) — distinct directions, non-zero norms.
inline EmbeddingTable toy_embeddings(int n_categories, int dim) {
  EmbeddingTable table;
  table.dim = dim;
  for (int c = 0; c < n_categories; ++c) {
    std::vector<double> row(dim, 0.0);
    row[c % dim] = 1.0 + c / 10.0;
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::vector<float> const_visual(int dim, float value) {
  return std::vector<float>(dim, value);
}

}  // namespace sgdec::test

#endif  // SGDEC_TESTS_TESTUTIL_HPP_
