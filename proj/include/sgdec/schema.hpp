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

#ifndef SGDEC_SCHEMA_HPP_
#define SGDEC_SCHEMA_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgdec/geometry.hpp"

namespace sgdec {

// Object-category and predicate name tables. Predicate index 0 is the
// reserved no-relation class used for negative pairs; annotated triples
// always reference predicates with index >= 1.
struct CategoryVocab {
  std::vector<std::string> object_categories;
  std::vector<std::string> predicates;

  // -1 when the name is unknown.
  int object_index(const std::string& name) const;
  int predicate_index(const std::string& name) const;

  // Unique names within each list, both lists non-empty.
  void validate() const;

  friend bool operator==(const CategoryVocab&, const CategoryVocab&) = default;
};

// Per-instance feature layout. The component vector is laid out as
// [visual; spatial; word]. The spatial block is produced by the built-in
// encoder and is always 128 wide.
struct FeatureDims {
  int visual = 4096;
  int spatial = 128;
  int word = 200;

  int component() const { return visual + spatial + word; }
  void validate() const;

  friend bool operator==(const FeatureDims&, const FeatureDims&) = default;
};

inline constexpr int kSpatialDim = 128;

// One detected object. visual_feature stays empty until a feature file is
// attached or a generator fills it in; everything downstream of component
// assembly requires it.
struct ObjectInstance {
  std::uint64_t instance_id = 0;
  int image_id = 0;
  int category = -1;
  BoundingBox box;
  std::vector<float> visual_feature;
};

// <subject, predicate, object> within one image, by instance id.
struct RelationTriple {
  int image_id = 0;
  std::uint64_t subject = 0;
  std::uint64_t object = 0;
  int predicate = 0;

  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
};

struct ImageRecord {
  int image_id = 0;
  double width = 0.0;
  double height = 0.0;
  std::vector<ObjectInstance> instances;
  std::vector<RelationTriple> triples;
};

class Dataset {
 public:
  CategoryVocab vocab;
  std::vector<ImageRecord> images;

  // Rebuilds the instance-id index; call after mutating images.
  void reindex();

  const ObjectInstance* find_instance(std::uint64_t instance_id) const;
  const ObjectInstance& instance(std::uint64_t instance_id) const;  // throws DataError
  const ImageRecord* find_image(int image_id) const;

  std::size_t instance_count() const;
  std::size_t triple_count() const;

  // Full invariant sweep: resolvable references, per-image unique instance
  // ids, category/predicate indices in range, subject != object, annotated
  // predicates >= 1, and (when dims given) visual feature widths.
  void validate(const FeatureDims* dims = nullptr) const;

 private:
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> instance_index_;
  std::unordered_map<int, std::size_t> image_index_;
};

// One row of word-embedding values per object category.
struct EmbeddingTable {
  int dim = 0;
  std::vector<std::vector<double>> rows;

  const std::vector<double>& of(int category) const;  // throws DataError
};

// The raw 8 box statistics behind the spatial encoding, all ratios of the
// image size except the final log aspect: (x_t/W, y_t/H, x_b/W, y_b/H,
// w/W, h/H, area/(W*H), log(w/h)).
std::array<double, 8> spatial_basis(const BoundingBox& box, double image_w,
                                    double image_h);

// Deterministic 128-wide sinusoidal expansion of spatial_basis: for each of
// the 8 statistics v and each frequency 2^f (f = 0..7), emits
// sin(v * pi/2 * 2^f) and cos(v * pi/2 * 2^f). Boxes reaching outside the
// image are clamped to it (with a warning on stderr) before encoding.
std::vector<double> spatial_encode(const BoundingBox& box, double image_w,
                                   double image_h);

// One object instance ready for retrieval and composition: identity, box,
// and the concatenated [visual; spatial; word] feature.
struct VisualComponent {
  std::uint64_t instance_id = 0;
  int image_id = 0;
  int category = -1;
  BoundingBox box;
  std::vector<double> feature;
};

// Builds the concatenated component feature for one instance. The instance
// must carry its visual feature and the embedding table must cover its
// category.
VisualComponent assemble_component(const ObjectInstance& inst, double image_w,
                                   double image_h, const EmbeddingTable& embeddings,
                                   const FeatureDims& dims);

// Components for every instance of a dataset, assembled once and shared by
// the dictionary, the composer, training and evaluation.
class ComponentStore {
 public:
  ComponentStore(FeatureDims dims) : dims_(dims) {}

  const FeatureDims& dims() const { return dims_; }
  const VisualComponent& of(std::uint64_t instance_id) const;  // throws DataError
  void put(VisualComponent component);
  std::size_t size() const { return by_instance_.size(); }

 private:
  FeatureDims dims_;
  std::unordered_map<std::uint64_t, VisualComponent> by_instance_;
};

ComponentStore assemble_all(const Dataset& ds, const EmbeddingTable& embeddings,
                            const FeatureDims& dims);

// --- file formats ----------------------------------------------------------
//
// Annotations ("sgda 1"): line-delimited text, '#' comments and blank lines
// ignored. Header line "sgda 1", then optional vocabulary declarations
// ("objcat <name>", "pred <name>"; names may contain spaces and are indexed
// in file order), then per image:
//   image <image_id> <width> <height>
//   inst <instance_id> <category name> <x_t> <y_t> <x_b> <y_b>
//   rel <subject_id> <predicate name> <object_id>
// When the file declares no vocabulary the caller must supply one.
//
// Features ("VCF1"): little-endian binary. Magic "VCF1", u32 count,
// u32 dimension, then per record a u64 instance id followed by
// `dimension` f32 values.
//
// Embeddings: text, one line per token: the token followed by whitespace-
// separated decimal values. Multi-word category names resolve to the mean
// of their tokens' vectors.

Dataset load_dataset(const std::string& annotations_path,
                     const std::optional<std::string>& features_path,
                     const FeatureDims& dims,
                     const std::optional<CategoryVocab>& vocab = std::nullopt);

void save_dataset(const Dataset& ds, const std::string& annotations_path);

// Attaches visual features from a VCF1 file; every instance must be covered.
void load_features(Dataset& ds, const std::string& path, const FeatureDims& dims);

// Reads just the dimension field of a VCF1 header.
int peek_feature_dim(const std::string& path);

void save_features(const Dataset& ds, const std::string& path, int dim);

EmbeddingTable load_embeddings(const std::string& path, const CategoryVocab& vocab);

void save_embedding_file(const std::string& path,
                         const std::vector<std::string>& tokens,
                         const std::vector<std::vector<double>>& vectors);

}  // namespace sgdec

#endif  // SGDEC_SCHEMA_HPP_
