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

#include "sgdec/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <json.hpp>

#include "binio.hpp"
#include "sgdec/errors.hpp"
#include "sgdec/rng.hpp"

namespace sgdec {

namespace {

constexpr double kProbFloor = 1e-12;

struct ForwardCache {
  Eigen::VectorXd hidden_s;  // post-tanh, hidden mode only
  Eigen::VectorXd hidden_o;
  Eigen::VectorXd fused;  // input to the output layer
  Eigen::VectorXd probs;
};

ForwardCache run_forward(const ClassifierParams& params, const Eigen::VectorXd& x) {
  const int f = params.config.feature_dim;
  if (x.size() != 2 * f)
    throw DataError("pair feature width " + std::to_string(x.size()) +
                    " does not match 2 x " + std::to_string(f));
  ForwardCache cache;
  if (params.config.hidden_dim > 0) {
    const int h = params.config.hidden_dim;
    cache.hidden_s = (params.hidden_w * x.head(f) + params.hidden_b).array().tanh();
    cache.hidden_o = (params.hidden_w * x.tail(f) + params.hidden_b).array().tanh();
    cache.fused.resize(2 * h);
    cache.fused << cache.hidden_s, cache.hidden_o;
  } else {
    cache.fused = x;
  }
  Eigen::VectorXd logits = params.out_w * cache.fused + params.out_b;
  logits.array() -= logits.maxCoeff();
  cache.probs = logits.array().exp();
  cache.probs /= cache.probs.sum();
  return cache;
}

Eigen::VectorXd pair_of(const VisualComponent& subject, const VisualComponent& object) {
  Eigen::VectorXd x(subject.feature.size() + object.feature.size());
  x << Eigen::Map<const Eigen::VectorXd>(subject.feature.data(), subject.feature.size()),
      Eigen::Map<const Eigen::VectorXd>(object.feature.data(), object.feature.size());
  return x;
}

Eigen::VectorXd to_eigen(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

ClassifierParams ClassifierParams::init(const ClassifierConfig& config,
                                        std::uint64_t seed) {
  if (config.n_classes < 2 || config.feature_dim < 1 || config.hidden_dim < 0)
    throw DataError("invalid classifier shape");
  ClassifierParams params;
  params.config = config;
  if (config.hidden_dim > 0) {
    std::mt19937_64 rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(config.feature_dim));
    params.hidden_w.resize(config.hidden_dim, config.feature_dim);
    for (int r = 0; r < config.hidden_dim; ++r)
      for (int c = 0; c < config.feature_dim; ++c)
        params.hidden_w(r, c) = scale * normal(rng);
    params.hidden_b = Eigen::VectorXd::Zero(config.hidden_dim);
  }
  params.out_w = Eigen::MatrixXd::Zero(config.n_classes, params.pair_dim());
  params.out_b = Eigen::VectorXd::Zero(config.n_classes);
  return params;
}

Eigen::VectorXd forward(const ClassifierParams& params,
                        const Eigen::VectorXd& pair_feature) {
  return run_forward(params, pair_feature).probs;
}

double ce_loss(const Eigen::VectorXd& probs, int label) {
  if (label < 0 || label >= probs.size())
    throw DataError("label " + std::to_string(label) + " outside class range");
  return -std::log(std::max(probs[label], kProbFloor));
}

double kl_loss(const Eigen::VectorXd& anchor_probs,
               const Eigen::VectorXd& composed_probs) {
  if (anchor_probs.size() != composed_probs.size())
    throw DataError("distribution widths differ in KL");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < anchor_probs.size(); ++i) {
    const double t = anchor_probs[i];
    if (t <= 0.0) continue;
    sum += t * (std::log(std::max(t, kProbFloor)) -
                std::log(std::max(composed_probs[i], kProbFloor)));
  }
  return sum;
}

double Gradients::squared_norm() const {
  double sq = out_w.squaredNorm() + out_b.squaredNorm();
  if (hidden_w.size() > 0) sq += hidden_w.squaredNorm() + hidden_b.squaredNorm();
  return sq;
}

Gradients grad(const ClassifierParams& params, const std::vector<TrainItem>& batch,
               double kl_weight, double* loss_out) {
  if (batch.empty()) throw DataError("empty training batch");
  const int f = params.config.feature_dim;
  const bool hidden = params.config.hidden_dim > 0;

  Gradients g;
  g.out_w = Eigen::MatrixXd::Zero(params.out_w.rows(), params.out_w.cols());
  g.out_b = Eigen::VectorXd::Zero(params.out_b.size());
  if (hidden) {
    g.hidden_w = Eigen::MatrixXd::Zero(params.hidden_w.rows(), params.hidden_w.cols());
    g.hidden_b = Eigen::VectorXd::Zero(params.hidden_b.size());
  }

  std::size_t n_with_target = 0;
  for (const auto& item : batch)
    if (item.anchor_target.has_value()) ++n_with_target;

  const double ce_scale = 1.0 / static_cast<double>(batch.size());
  const double kl_scale =
      n_with_target > 0 ? kl_weight / static_cast<double>(n_with_target) : 0.0;

  double ce_sum = 0.0;
  double kl_sum = 0.0;
  for (const auto& item : batch) {
    const ForwardCache cache = run_forward(params, item.pair_feature);
    ce_sum += ce_loss(cache.probs, item.label);

    Eigen::VectorXd dz = ce_scale * cache.probs;
    dz[item.label] -= ce_scale;
    if (item.anchor_target.has_value()) {
      const Eigen::VectorXd& target = *item.anchor_target;
      if (target.size() != cache.probs.size())
        throw DataError("anchor target width differs from class count");
      kl_sum += kl_loss(target, cache.probs);
      dz += kl_scale * (cache.probs - target);
    }

    g.out_w.noalias() += dz * cache.fused.transpose();
    g.out_b += dz;
    if (hidden) {
      const Eigen::VectorXd du = params.out_w.transpose() * dz;
      const int h = params.config.hidden_dim;
      const Eigen::VectorXd dh_s =
          (1.0 - cache.hidden_s.array().square()) * du.head(h).array();
      const Eigen::VectorXd dh_o =
          (1.0 - cache.hidden_o.array().square()) * du.tail(h).array();
      g.hidden_w.noalias() += dh_s * item.pair_feature.head(f).transpose();
      g.hidden_w.noalias() += dh_o * item.pair_feature.tail(f).transpose();
      g.hidden_b += dh_s + dh_o;
    }
  }

  if (loss_out != nullptr) {
    *loss_out = ce_sum / static_cast<double>(batch.size()) +
                (n_with_target > 0
                     ? kl_weight * kl_sum / static_cast<double>(n_with_target)
                     : 0.0);
  }
  return g;
}

double total_loss(const ClassifierParams& params, const std::vector<TrainItem>& batch,
                  double kl_weight) {
  if (batch.empty()) throw DataError("empty training batch");
  double ce_sum = 0.0, kl_sum = 0.0;
  std::size_t n_with_target = 0;
  for (const auto& item : batch) {
    const Eigen::VectorXd probs = forward(params, item.pair_feature);
    ce_sum += ce_loss(probs, item.label);
    if (item.anchor_target.has_value()) {
      kl_sum += kl_loss(*item.anchor_target, probs);
      ++n_with_target;
    }
  }
  double loss = ce_sum / static_cast<double>(batch.size());
  if (n_with_target > 0)
    loss += kl_weight * kl_sum / static_cast<double>(n_with_target);
  return loss;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DataError("learning rate must be positive");
  if (iterations < 1) throw DataError("iteration count must be positive");
  if (kl_weight < 0.0) throw DataError("KL weight must be >= 0");
  if (per_image_cap < 1) throw DataError("per-image triple cap must be >= 1");
  if (negative_ratio < 0.0) throw DataError("negative ratio must be >= 0");
  if (n_predicates < 1 || k_images < 1) throw DataError("N and K must be >= 1");
  if (hidden_dim < 0) throw DataError("hidden width must be >= 0");
}

namespace {

// Everything train() needs per image, resolved once up front.
struct ImageTrainData {
  const ImageRecord* image = nullptr;
  std::vector<const ComposedRelation*> composed;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> negative_candidates;
};

}  // namespace

TrainResult train(const Dataset& ds, const ComponentStore& components,
                  const std::vector<ComposedRelation>& corpus,
                  const std::vector<int>* image_filter, const TrainConfig& cfg) {
  cfg.validate();
  const int n_classes = static_cast<int>(ds.vocab.predicates.size());
  const ClassifierConfig shape{n_classes, components.dims().component(),
                               cfg.hidden_dim};
  ClassifierParams params = ClassifierParams::init(shape, mix_seed(cfg.seed, 1));

  std::vector<int> train_images;
  if (image_filter != nullptr) {
    for (const int image_id : *image_filter) {
      if (ds.find_image(image_id) == nullptr)
        throw DataError("training filter names unknown image " +
                        std::to_string(image_id));
      train_images.push_back(image_id);
    }
  } else {
    for (const auto& image : ds.images) train_images.push_back(image.image_id);
  }
  if (train_images.empty()) throw DataError("no training images");

  std::map<int, ImageTrainData> per_image;
  for (const int image_id : train_images)
    per_image[image_id].image = ds.find_image(image_id);
  for (const auto& item : corpus) {
    const auto it = per_image.find(item.anchor.image_id);
    if (it != per_image.end()) it->second.composed.push_back(&item);
  }
  for (auto& [image_id, data] : per_image) {
    std::set<std::pair<std::uint64_t, std::uint64_t>> annotated;
    for (const auto& triple : data.image->triples)
      annotated.emplace(triple.subject, triple.object);
    for (const auto& a : data.image->instances) {
      for (const auto& b : data.image->instances) {
        if (a.instance_id == b.instance_id) continue;
        if (annotated.count({a.instance_id, b.instance_id})) continue;
        data.negative_candidates.emplace_back(a.instance_id, b.instance_id);
      }
    }
  }

  std::optional<BalancedSampler> sampler;
  if (cfg.balanced_sampling) {
    sampler.emplace(BalancedSampler::from_data(
        ds, corpus, image_filter,
        SamplerConfig{cfg.n_predicates, cfg.k_images, mix_seed(cfg.seed, 3)}));
  }
  std::mt19937_64 rng(mix_seed(cfg.seed, 2));
  const std::size_t batch_images =
      static_cast<std::size_t>(cfg.n_predicates) * cfg.k_images;

  TrainResult result;
  result.loss_trace.reserve(cfg.iterations);
  for (int iteration = 0; iteration < cfg.iterations; ++iteration) {
    std::vector<int> image_ids;
    if (sampler.has_value()) {
      for (const auto& [predicate, images] : sampler->next_batch())
        image_ids.insert(image_ids.end(), images.begin(), images.end());
    } else {
      for (std::size_t i = 0; i < batch_images; ++i)
        image_ids.push_back(train_images[uniform_index(rng, train_images.size())]);
    }

    std::vector<TrainItem> items;
    std::vector<std::optional<Eigen::VectorXd>> anchor_pairs;
    for (const int image_id : image_ids) {
      const ImageTrainData& data = per_image.at(image_id);
      const std::size_t n_real = data.image->triples.size();
      const std::size_t n_total = n_real + data.composed.size();

      std::vector<std::size_t> picks(n_total);
      for (std::size_t i = 0; i < n_total; ++i) picks[i] = i;
      if (n_total > static_cast<std::size_t>(cfg.per_image_cap)) {
        shuffle_vec(picks, rng);
        picks.resize(cfg.per_image_cap);
      }

      std::size_t n_positive = 0;
      for (const std::size_t pick : picks) {
        TrainItem item;
        if (pick < n_real) {
          const RelationTriple& triple = data.image->triples[pick];
          item.pair_feature = pair_of(components.of(triple.subject),
                                      components.of(triple.object));
          item.label = triple.predicate;
          anchor_pairs.emplace_back(std::nullopt);
        } else {
          const ComposedRelation& composed = *data.composed[pick - n_real];
          item.pair_feature = to_eigen(composed.pair_feature());
          item.label = composed.predicate_label;
          anchor_pairs.emplace_back(pair_of(components.of(composed.anchor.subject),
                                            components.of(composed.anchor.object)));
        }
        items.push_back(std::move(item));
        ++n_positive;
      }

      const std::size_t want_negatives = static_cast<std::size_t>(
          std::llround(cfg.negative_ratio * static_cast<double>(n_positive)));
      if (want_negatives > 0 && !data.negative_candidates.empty()) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> chosen;
        if (want_negatives >= data.negative_candidates.size()) {
          chosen = data.negative_candidates;
        } else {
          chosen = sample_without_replacement(data.negative_candidates,
                                              want_negatives, rng);
        }
        for (const auto& [subject_id, object_id] : chosen) {
          TrainItem item;
          item.pair_feature =
              pair_of(components.of(subject_id), components.of(object_id));
          item.label = 0;
          items.push_back(std::move(item));
          anchor_pairs.emplace_back(std::nullopt);
        }
      }
    }
    if (items.empty()) throw DataError("assembled an empty training batch");

    // Targets are the anchors' current predictions, detached.
    for (std::size_t i = 0; i < items.size(); ++i)
      if (anchor_pairs[i].has_value())
        items[i].anchor_target = forward(params, *anchor_pairs[i]);

    double loss = 0.0;
    const Gradients g = grad(params, items, cfg.kl_weight, &loss);
    if (!std::isfinite(loss))
      throw NumericError("loss diverged at iteration " + std::to_string(iteration));

    params.out_w -= cfg.learning_rate * g.out_w;
    params.out_b -= cfg.learning_rate * g.out_b;
    if (shape.hidden_dim > 0) {
      params.hidden_w -= cfg.learning_rate * g.hidden_w;
      params.hidden_b -= cfg.learning_rate * g.hidden_b;
    }
    result.loss_trace.push_back(loss);
  }

  result.params = std::move(params);
  return result;
}

std::vector<EvalRecord> predict_records(const ClassifierParams& params,
                                        const Dataset& ds,
                                        const ComponentStore& components) {
  std::vector<EvalRecord> records;
  records.reserve(ds.images.size());
  for (const auto& image : ds.images) {
    EvalRecord record;
    record.image_id = image.image_id;
    record.ground_truth = image.triples;
    for (const auto& subject : image.instances) {
      for (const auto& object : image.instances) {
        if (subject.instance_id == object.instance_id) continue;
        const Eigen::VectorXd probs =
            forward(params, pair_of(components.of(subject.instance_id),
                                    components.of(object.instance_id)));
        int best = 1;
        for (int c = 2; c < probs.size(); ++c)
          if (probs[c] > probs[best]) best = c;
        record.predictions.push_back(PredictedTriple{
            subject.instance_id, object.instance_id, best, probs[best]});
      }
    }
    std::stable_sort(record.predictions.begin(), record.predictions.end(),
                     [](const PredictedTriple& a, const PredictedTriple& b) {
                       return a.score > b.score;
                     });
    records.push_back(std::move(record));
  }
  return records;
}

namespace {

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      binio::write_f32(out, static_cast<float>(m(r, c)));
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    binio::write_f32(out, static_cast<float>(v[i]));
}

void read_matrix(std::istream& in, Eigen::MatrixXd& m, const std::string& what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = binio::read_f32(in, what);
}

void read_vector(std::istream& in, Eigen::VectorXd& v, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = binio::read_f32(in, what);
}

}  // namespace

void save_checkpoint(const ClassifierParams& params, const std::string& path,
                     const std::map<std::string, std::string>& extra_echo) {
  nlohmann::json echo;
  echo["n_classes"] = params.config.n_classes;
  echo["feature_dim"] = params.config.feature_dim;
  echo["hidden_dim"] = params.config.hidden_dim;
  echo["run"] = extra_echo;
  const std::string text = echo.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.write("SGC1", 4);
  binio::write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (params.config.hidden_dim > 0) {
    write_matrix(out, params.hidden_w);
    write_vector(out, params.hidden_b);
  }
  write_matrix(out, params.out_w);
  write_vector(out, params.out_b);
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "SGC1")
    throw DataError(path + ": bad magic, expected SGC1");
  const std::uint32_t len = binio::read_u32(in, path + " header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw DataError(path + ": truncated header");

  nlohmann::json echo;
  try {
    echo = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed header: " + e.what());
  }

  Checkpoint checkpoint;
  ClassifierConfig config;
  config.n_classes = echo.at("n_classes").get<int>();
  config.feature_dim = echo.at("feature_dim").get<int>();
  config.hidden_dim = echo.at("hidden_dim").get<int>();
  checkpoint.params.config = config;
  if (echo.contains("run"))
    for (const auto& [key, value] : echo.at("run").items())
      checkpoint.extra_echo[key] = value.get<std::string>();

  if (config.hidden_dim > 0) {
    checkpoint.params.hidden_w.resize(config.hidden_dim, config.feature_dim);
    checkpoint.params.hidden_b.resize(config.hidden_dim);
    read_matrix(in, checkpoint.params.hidden_w, path + " hidden weights");
    read_vector(in, checkpoint.params.hidden_b, path + " hidden bias");
  }
  checkpoint.params.out_w.resize(config.n_classes, checkpoint.params.pair_dim());
  checkpoint.params.out_b.resize(config.n_classes);
  read_matrix(in, checkpoint.params.out_w, path + " output weights");
  read_vector(in, checkpoint.params.out_b, path + " output bias");
  return checkpoint;
}

void save_loss_trace(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write loss trace " + path);
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << i << " " << format_double(trace[i]) << "\n";
  if (!out) throw DataError("failed writing loss trace " + path);
}

}  // namespace sgdec
