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

#include "sgdec/schema.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "binio.hpp"
#include "sgdec/errors.hpp"

namespace sgdec {

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& tok, const std::string& where) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(where + ": expected a number, got '" + tok + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& tok, const std::string& where) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(where + ": expected an unsigned integer, got '" + tok + "'");
  return value;
}

int parse_int(const std::string& tok, const std::string& where) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(where + ": expected an integer, got '" + tok + "'");
  return value;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t first,
                        std::size_t last) {
  std::string name;
  for (std::size_t i = first; i < last; ++i) {
    if (!name.empty()) name += ' ';
    name += tokens[i];
  }
  return name;
}

void check_name(const std::string& name, const std::string& what) {
  if (name.empty()) throw DataError(what + " name is empty");
  if (name.front() == ' ' || name.back() == ' ' ||
      name.find("  ") != std::string::npos ||
      name.find_first_of("\t\r\n") != std::string::npos) {
    throw DataError(what + " name '" + name + "' has irregular whitespace");
  }
}

}  // namespace

int CategoryVocab::object_index(const std::string& name) const {
  for (std::size_t i = 0; i < object_categories.size(); ++i)
    if (object_categories[i] == name) return static_cast<int>(i);
  return -1;
}

int CategoryVocab::predicate_index(const std::string& name) const {
  for (std::size_t i = 0; i < predicates.size(); ++i)
    if (predicates[i] == name) return static_cast<int>(i);
  return -1;
}

void CategoryVocab::validate() const {
  if (object_categories.empty()) throw DataError("vocabulary has no object categories");
  if (predicates.empty()) throw DataError("vocabulary has no predicates");
  std::unordered_set<std::string> seen;
  for (const auto& name : object_categories) {
    check_name(name, "object category");
    if (!seen.insert(name).second)
      throw DataError("duplicate object category '" + name + "'");
  }
  seen.clear();
  for (const auto& name : predicates) {
    check_name(name, "predicate");
    if (!seen.insert(name).second) throw DataError("duplicate predicate '" + name + "'");
  }
}

void FeatureDims::validate() const {
  if (visual < 1 || word < 1) throw DataError("feature dimensions must be positive");
  if (spatial != kSpatialDim)
    throw DataError("spatial dimension is fixed at " + std::to_string(kSpatialDim) +
                    " by the built-in encoder");
}

void Dataset::reindex() {
  instance_index_.clear();
  image_index_.clear();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ImageRecord& image = images[i];
    if (!image_index_.emplace(image.image_id, i).second)
      throw DataError("duplicate image id " + std::to_string(image.image_id));
    for (std::size_t j = 0; j < image.instances.size(); ++j) {
      const auto id = image.instances[j].instance_id;
      if (!instance_index_.emplace(id, std::make_pair(i, j)).second)
        throw DataError("duplicate instance id " + std::to_string(id));
    }
  }
}

const ObjectInstance* Dataset::find_instance(std::uint64_t instance_id) const {
  const auto it = instance_index_.find(instance_id);
  if (it == instance_index_.end()) return nullptr;
  return &images[it->second.first].instances[it->second.second];
}

const ObjectInstance& Dataset::instance(std::uint64_t instance_id) const {
  const ObjectInstance* inst = find_instance(instance_id);
  if (inst == nullptr)
    throw DataError("unknown instance id " + std::to_string(instance_id));
  return *inst;
}

const ImageRecord* Dataset::find_image(int image_id) const {
  const auto it = image_index_.find(image_id);
  return it == image_index_.end() ? nullptr : &images[it->second];
}

std::size_t Dataset::instance_count() const {
  std::size_t n = 0;
  for (const auto& image : images) n += image.instances.size();
  return n;
}

std::size_t Dataset::triple_count() const {
  std::size_t n = 0;
  for (const auto& image : images) n += image.triples.size();
  return n;
}

void Dataset::validate(const FeatureDims* dims) const {
  vocab.validate();
  const int n_obj = static_cast<int>(vocab.object_categories.size());
  const int n_pred = static_cast<int>(vocab.predicates.size());
  for (const auto& image : images) {
    const std::string where = "image " + std::to_string(image.image_id);
    if (!(image.width > 0.0) || !(image.height > 0.0))
      throw DataError(where + ": non-positive dimensions");
    std::unordered_set<std::uint64_t> local_ids;
    for (const auto& inst : image.instances) {
      if (inst.image_id != image.image_id)
        throw DataError(where + ": instance " + std::to_string(inst.instance_id) +
                        " carries a foreign image id");
      if (!local_ids.insert(inst.instance_id).second)
        throw DataError(where + ": duplicate instance id " +
                        std::to_string(inst.instance_id));
      if (inst.category < 0 || inst.category >= n_obj)
        throw DataError(where + ": instance " + std::to_string(inst.instance_id) +
                        " has out-of-range category");
      if (dims != nullptr && !inst.visual_feature.empty() &&
          static_cast<int>(inst.visual_feature.size()) != dims->visual)
        throw DataError(where + ": instance " + std::to_string(inst.instance_id) +
                        " visual feature width " +
                        std::to_string(inst.visual_feature.size()) +
                        " does not match configured " + std::to_string(dims->visual));
      for (const float v : inst.visual_feature)
        if (!std::isfinite(v))
          throw DataError(where + ": instance " + std::to_string(inst.instance_id) +
                          " has a non-finite visual feature");
    }
    for (const auto& triple : image.triples) {
      if (triple.image_id != image.image_id)
        throw DataError(where + ": triple carries a foreign image id");
      if (triple.subject == triple.object)
        throw DataError(where + ": triple relates instance " +
                        std::to_string(triple.subject) + " to itself");
      if (!local_ids.count(triple.subject))
        throw DataError(where + ": triple references unknown instance id " +
                        std::to_string(triple.subject));
      if (!local_ids.count(triple.object))
        throw DataError(where + ": triple references unknown instance id " +
                        std::to_string(triple.object));
      if (triple.predicate < 1 || triple.predicate >= n_pred)
        throw DataError(where + ": triple predicate index " +
                        std::to_string(triple.predicate) +
                        " outside the annotated range");
    }
  }
}

const std::vector<double>& EmbeddingTable::of(int category) const {
  if (category < 0 || category >= static_cast<int>(rows.size()))
    throw DataError("no embedding for category index " + std::to_string(category));
  return rows[category];
}

std::array<double, 8> spatial_basis(const BoundingBox& box, double image_w,
                                    double image_h) {
  if (!(image_w > 0.0) || !(image_h > 0.0))
    throw DataError("image dimensions must be positive");
  double x_t = box.x_t(), y_t = box.y_t(), x_b = box.x_b(), y_b = box.y_b();
  const bool outside = x_t < 0.0 || y_t < 0.0 || x_b > image_w || y_b > image_h;
  if (outside) {
    x_t = std::clamp(x_t, 0.0, image_w);
    x_b = std::clamp(x_b, 0.0, image_w);
    y_t = std::clamp(y_t, 0.0, image_h);
    y_b = std::clamp(y_b, 0.0, image_h);
    if (!(x_b > x_t) || !(y_b > y_t))
      throw DataError("box lies entirely outside its image");
    std::cerr << "warning: box clamped to image bounds\n";
  }
  const double w = x_b - x_t;
  const double h = y_b - y_t;
  return {x_t / image_w,         y_t / image_h, x_b / image_w, y_b / image_h,
          w / image_w,           h / image_h,   (w * h) / (image_w * image_h),
          std::log(w / h)};
}

std::vector<double> spatial_encode(const BoundingBox& box, double image_w,
                                   double image_h) {
  const std::array<double, 8> basis = spatial_basis(box, image_w, image_h);
  std::vector<double> out(kSpatialDim);
  std::size_t at = 0;
  for (const double v : basis) {
    double scale = M_PI / 2.0;
    for (int f = 0; f < 8; ++f) {
      out[at++] = std::sin(v * scale);
      out[at++] = std::cos(v * scale);
      scale *= 2.0;
    }
  }
  return out;
}

VisualComponent assemble_component(const ObjectInstance& inst, double image_w,
                                   double image_h, const EmbeddingTable& embeddings,
                                   const FeatureDims& dims) {
  if (static_cast<int>(inst.visual_feature.size()) != dims.visual)
    throw DataError("instance " + std::to_string(inst.instance_id) +
                    " has no visual feature of width " + std::to_string(dims.visual));
  const std::vector<double>& word = embeddings.of(inst.category);
  if (static_cast<int>(word.size()) != dims.word)
    throw DataError("embedding width " + std::to_string(word.size()) +
                    " does not match configured " + std::to_string(dims.word));

  VisualComponent component;
  component.instance_id = inst.instance_id;
  component.image_id = inst.image_id;
  component.category = inst.category;
  component.box = inst.box;
  component.feature.reserve(dims.component());
  for (const float v : inst.visual_feature) component.feature.push_back(v);
  const std::vector<double> spatial = spatial_encode(inst.box, image_w, image_h);
  component.feature.insert(component.feature.end(), spatial.begin(), spatial.end());
  component.feature.insert(component.feature.end(), word.begin(), word.end());
  return component;
}

const VisualComponent& ComponentStore::of(std::uint64_t instance_id) const {
  const auto it = by_instance_.find(instance_id);
  if (it == by_instance_.end())
    throw DataError("no component for instance id " + std::to_string(instance_id));
  return it->second;
}

void ComponentStore::put(VisualComponent component) {
  by_instance_[component.instance_id] = std::move(component);
}

ComponentStore assemble_all(const Dataset& ds, const EmbeddingTable& embeddings,
                            const FeatureDims& dims) {
  ComponentStore store(dims);
  for (const auto& image : ds.images)
    for (const auto& inst : image.instances)
      store.put(assemble_component(inst, image.width, image.height, embeddings, dims));
  return store;
}

// --- annotations -------------------------------------------------------------

Dataset load_dataset(const std::string& annotations_path,
                     const std::optional<std::string>& features_path,
                     const FeatureDims& dims,
                     const std::optional<CategoryVocab>& vocab) {
  dims.validate();
  std::ifstream in(annotations_path);
  if (!in) throw DataError("cannot open annotations file " + annotations_path);

  Dataset ds;
  CategoryVocab declared;
  bool saw_header = false;
  bool saw_image = false;
  bool vocab_resolved = false;
  std::string line;
  int line_no = 0;

  const auto where = [&]() {
    return annotations_path + ":" + std::to_string(line_no);
  };
  const auto resolve_vocab = [&]() {
    if (vocab_resolved) return;
    if (!declared.object_categories.empty() || !declared.predicates.empty()) {
      declared.validate();
      if (vocab.has_value() && !(*vocab == declared))
        throw DataError(annotations_path +
                        ": declared vocabulary differs from the supplied one");
      ds.vocab = declared;
    } else if (vocab.has_value()) {
      ds.vocab = *vocab;
      ds.vocab.validate();
    } else {
      throw DataError(annotations_path +
                      ": no vocabulary declared and none supplied");
    }
    vocab_resolved = true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    const std::string& kind = tokens[0];

    if (!saw_header) {
      if (kind != "sgda" || tokens.size() != 2 || tokens[1] != "1")
        throw DataError(where() + ": expected header 'sgda 1'");
      saw_header = true;
      continue;
    }

    if (kind == "objcat" || kind == "pred") {
      if (saw_image)
        throw DataError(where() + ": vocabulary lines must precede image records");
      const std::string name = join_tokens(tokens, 1, tokens.size());
      check_name(name, kind == "objcat" ? "object category" : "predicate");
      (kind == "objcat" ? declared.object_categories : declared.predicates)
          .push_back(name);
      continue;
    }

    if (kind == "image") {
      if (tokens.size() != 4)
        throw DataError(where() + ": image line needs id, width, height");
      resolve_vocab();
      saw_image = true;
      ImageRecord image;
      image.image_id = parse_int(tokens[1], where());
      image.width = parse_double(tokens[2], where());
      image.height = parse_double(tokens[3], where());
      ds.images.push_back(std::move(image));
      continue;
    }

    if (kind == "inst") {
      if (!saw_image) throw DataError(where() + ": inst line before any image");
      if (tokens.size() < 7)
        throw DataError(where() + ": inst line needs id, category, 4 coordinates");
      ObjectInstance inst;
      inst.instance_id = parse_u64(tokens[1], where());
      inst.image_id = ds.images.back().image_id;
      const std::string name = join_tokens(tokens, 2, tokens.size() - 4);
      inst.category = ds.vocab.object_index(name);
      if (inst.category < 0)
        throw DataError(where() + ": unknown object category '" + name + "'");
      const std::size_t n = tokens.size();
      try {
        inst.box = BoundingBox(parse_double(tokens[n - 4], where()),
                               parse_double(tokens[n - 3], where()),
                               parse_double(tokens[n - 2], where()),
                               parse_double(tokens[n - 1], where()));
      } catch (const DataError& e) {
        throw DataError(where() + ": " + e.what());
      }
      ds.images.back().instances.push_back(std::move(inst));
      continue;
    }

    if (kind == "rel") {
      if (!saw_image) throw DataError(where() + ": rel line before any image");
      if (tokens.size() < 4)
        throw DataError(where() + ": rel line needs subject, predicate, object");
      RelationTriple triple;
      triple.image_id = ds.images.back().image_id;
      triple.subject = parse_u64(tokens[1], where());
      triple.object = parse_u64(tokens.back(), where());
      const std::string name = join_tokens(tokens, 2, tokens.size() - 1);
      triple.predicate = ds.vocab.predicate_index(name);
      if (triple.predicate < 0)
        throw DataError(where() + ": unknown predicate '" + name + "'");
      if (triple.predicate == 0)
        throw DataError(where() + ": predicate '" + name +
                        "' is the reserved no-relation class");
      ds.images.back().triples.push_back(triple);
      continue;
    }

    throw DataError(where() + ": unknown record kind '" + kind + "'");
  }
  if (!saw_header) throw DataError(annotations_path + ": missing 'sgda 1' header");
  resolve_vocab();

  ds.reindex();
  ds.validate(&dims);
  if (features_path.has_value()) load_features(ds, *features_path, dims);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& annotations_path) {
  std::ofstream out(annotations_path, std::ios::binary);
  if (!out) throw DataError("cannot write annotations file " + annotations_path);
  out << "sgda 1\n";
  for (const auto& name : ds.vocab.object_categories) out << "objcat " << name << "\n";
  for (const auto& name : ds.vocab.predicates) out << "pred " << name << "\n";
  for (const auto& image : ds.images) {
    out << "image " << image.image_id << " " << format_double(image.width) << " "
        << format_double(image.height) << "\n";
    for (const auto& inst : image.instances) {
      out << "inst " << inst.instance_id << " "
          << ds.vocab.object_categories[inst.category] << " "
          << format_double(inst.box.x_t()) << " " << format_double(inst.box.y_t())
          << " " << format_double(inst.box.x_b()) << " "
          << format_double(inst.box.y_b()) << "\n";
    }
    for (const auto& triple : image.triples) {
      out << "rel " << triple.subject << " " << ds.vocab.predicates[triple.predicate]
          << " " << triple.object << "\n";
    }
  }
  if (!out) throw DataError("failed writing annotations file " + annotations_path);
}

// --- features ----------------------------------------------------------------

void load_features(Dataset& ds, const std::string& path, const FeatureDims& dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "VCF1")
    throw DataError(path + ": bad magic, expected VCF1");
  const std::uint32_t count = binio::read_u32(in, path + " count");
  const std::uint32_t dim = binio::read_u32(in, path + " dimension");
  if (static_cast<int>(dim) != dims.visual)
    throw DataError(path + ": feature dimension " + std::to_string(dim) +
                    " does not match configured visual dimension " +
                    std::to_string(dims.visual));

  std::unordered_map<std::uint64_t, std::vector<float>> table;
  table.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t key = binio::read_u64(in, path + " record key");
    std::vector<float> values(dim);
    for (std::uint32_t d = 0; d < dim; ++d)
      values[d] = binio::read_f32(in, path + " record value");
    table[key] = std::move(values);
  }

  std::vector<std::uint64_t> missing;
  for (auto& image : ds.images) {
    for (auto& inst : image.instances) {
      const auto it = table.find(inst.instance_id);
      if (it == table.end()) {
        missing.push_back(inst.instance_id);
        continue;
      }
      inst.visual_feature = it->second;
    }
  }
  if (!missing.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i)
      ids += (i ? ", " : "") + std::to_string(missing[i]);
    throw DataError(path + ": no feature record for " +
                    std::to_string(missing.size()) + " instance(s): " + ids);
  }
}

int peek_feature_dim(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "VCF1")
    throw DataError(path + ": bad magic, expected VCF1");
  binio::read_u32(in, path + " count");
  return static_cast<int>(binio::read_u32(in, path + " dimension"));
}

void save_features(const Dataset& ds, const std::string& path, int dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write feature file " + path);
  out.write("VCF1", 4);
  binio::write_u32(out, static_cast<std::uint32_t>(ds.instance_count()));
  binio::write_u32(out, static_cast<std::uint32_t>(dim));
  for (const auto& image : ds.images) {
    for (const auto& inst : image.instances) {
      if (static_cast<int>(inst.visual_feature.size()) != dim)
        throw DataError("instance " + std::to_string(inst.instance_id) +
                        " has no visual feature of width " + std::to_string(dim));
      binio::write_u64(out, inst.instance_id);
      for (const float v : inst.visual_feature) binio::write_f32(out, v);
    }
  }
  if (!out) throw DataError("failed writing feature file " + path);
}

// --- embeddings --------------------------------------------------------------

EmbeddingTable load_embeddings(const std::string& path, const CategoryVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);

  std::unordered_map<std::string, std::vector<double>> by_token;
  std::string line;
  int line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (tokens.size() < 2) throw DataError(where + ": token without values");
    std::vector<double> values;
    values.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const double v = parse_double(tokens[i], where);
      if (!std::isfinite(v)) throw DataError(where + ": non-finite value");
      values.push_back(v);
    }
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim)
      throw DataError(where + ": inconsistent embedding width");
    by_token[tokens[0]] = std::move(values);
  }
  if (dim < 0) throw DataError(path + ": no embeddings found");

  EmbeddingTable table;
  table.dim = dim;
  table.rows.reserve(vocab.object_categories.size());
  std::vector<std::string> unresolved;
  for (const auto& name : vocab.object_categories) {
    std::vector<double> sum(dim, 0.0);
    int found = 0;
    for (const auto& tok : split_ws(name)) {
      const auto it = by_token.find(tok);
      if (it == by_token.end()) continue;
      for (int d = 0; d < dim; ++d) sum[d] += it->second[d];
      ++found;
    }
    if (found == 0) {
      unresolved.push_back(name);
      table.rows.emplace_back();
      continue;
    }
    double norm = 0.0;
    for (int d = 0; d < dim; ++d) {
      sum[d] /= found;
      norm += sum[d] * sum[d];
    }
    if (norm == 0.0) unresolved.push_back(name + " (zero vector)");
    table.rows.push_back(std::move(sum));
  }
  if (!unresolved.empty()) {
    std::string names;
    for (std::size_t i = 0; i < unresolved.size() && i < 5; ++i)
      names += (i ? ", " : "") + unresolved[i];
    throw DataError(path + ": no usable embedding for " +
                    std::to_string(unresolved.size()) + " categor(ies): " + names);
  }
  return table;
}

void save_embedding_file(const std::string& path,
                         const std::vector<std::string>& tokens,
                         const std::vector<std::vector<double>>& vectors) {
  if (tokens.size() != vectors.size())
    throw DataError("embedding token/vector count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file " + path);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i];
    for (const double v : vectors[i]) out << " " << format_double(v);
    out << "\n";
  }
  if (!out) throw DataError("failed writing embedding file " + path);
}

}  // namespace sgdec
