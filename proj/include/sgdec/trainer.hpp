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

#ifndef SGDEC_TRAINER_HPP_
#define SGDEC_TRAINER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgdec/composer.hpp"
#include "sgdec/eval.hpp"
#include "sgdec/sampler.hpp"
#include "sgdec/schema.hpp"

namespace sgdec {

struct ClassifierConfig {
  int n_classes = 0;    // predicate classes, index 0 = no-relation
  int feature_dim = 0;  // width of one component feature
  int hidden_dim = 0;   // 0 = identity refinement

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

// Softmax predicate classifier over concatenated (subject, object) component
// features, with an optional shared tanh refinement layer applied to each
// element before fusion.
struct ClassifierParams {
  ClassifierConfig config;
  Eigen::MatrixXd hidden_w;  // hidden_dim x feature_dim (empty when identity)
  Eigen::VectorXd hidden_b;  // hidden_dim
  Eigen::MatrixXd out_w;     // n_classes x pair_dim
  Eigen::VectorXd out_b;     // n_classes

  int element_dim() const {
    return config.hidden_dim > 0 ? config.hidden_dim : config.feature_dim;
  }
  int pair_dim() const { return 2 * element_dim(); }

  // Zero output layer (uniform initial prediction); seeded Gaussian hidden
  // layer when hidden_dim > 0.
  static ClassifierParams init(const ClassifierConfig& config, std::uint64_t seed);
};

// Softmax probabilities for one pair feature of width 2 * feature_dim.
Eigen::VectorXd forward(const ClassifierParams& params,
                        const Eigen::VectorXd& pair_feature);

// -log p[label], with probabilities floored at 1e-12.
double ce_loss(const Eigen::VectorXd& probs, int label);

// KL(anchor || composed) with 1e-12 flooring; the anchor distribution is a
// constant target, no gradient flows through it.
double kl_loss(const Eigen::VectorXd& anchor_probs,
               const Eigen::VectorXd& composed_probs);

struct TrainItem {
  Eigen::VectorXd pair_feature;
  int label = 0;
  // Detached target distribution for composed relations; adds a KL term.
  std::optional<Eigen::VectorXd> anchor_target;
};

struct Gradients {
  Eigen::MatrixXd hidden_w;
  Eigen::VectorXd hidden_b;
  Eigen::MatrixXd out_w;
  Eigen::VectorXd out_b;

  double squared_norm() const;
};

// Analytic gradient of mean(CE) + kl_weight * mean(KL over items with a
// target); also reports the loss value when loss_out is non-null.
Gradients grad(const ClassifierParams& params, const std::vector<TrainItem>& batch,
               double kl_weight, double* loss_out = nullptr);

double total_loss(const ClassifierParams& params, const std::vector<TrainItem>& batch,
                  double kl_weight);

struct TrainConfig {
  double learning_rate = 0.5;
  int iterations = 2000;
  double kl_weight = 1.0;
  std::uint64_t seed = 0;
  int per_image_cap = 256;      // real + composed triples used per image
  double negative_ratio = 1.0;  // no-relation pairs per positive
  int n_predicates = 5;         // sampler N
  int k_images = 1;             // sampler K
  bool balanced_sampling = false;
  int hidden_dim = 0;

  void validate() const;
};

struct TrainResult {
  ClassifierParams params;
  std::vector<double> loss_trace;  // one entry per iteration
};

// Plain gradient descent over per-image batches. Balanced mode draws images
// predicate-first through a BalancedSampler built over real and composed
// triples; otherwise images are drawn uniformly. Composed relations train
// with their anchor's label plus a KL pull toward the anchor's current
// predicted distribution. Deterministic under cfg.seed; throws NumericError
// if the loss turns non-finite.
TrainResult train(const Dataset& ds, const ComponentStore& components,
                  const std::vector<ComposedRelation>& corpus,
                  const std::vector<int>* image_filter, const TrainConfig& cfg);

// PredCls inference over ground-truth boxes and labels: scores every ordered
// instance pair, keeps the best non-background predicate per pair (graph
// constraint), and ranks pairs by that score. Composition plays no part
// here; only the parameters and the dataset are consulted.
std::vector<EvalRecord> predict_records(const ClassifierParams& params,
                                        const Dataset& ds,
                                        const ComponentStore& components);

// Checkpoint: magic "SGC1", u32 length-prefixed JSON echo (classifier shape
// plus caller-supplied entries), then little-endian f32 blocks for
// hidden_w, hidden_b, out_w, out_b (row-major).
void save_checkpoint(const ClassifierParams& params, const std::string& path,
                     const std::map<std::string, std::string>& extra_echo = {});

struct Checkpoint {
  ClassifierParams params;
  std::map<std::string, std::string> extra_echo;
};

Checkpoint load_checkpoint(const std::string& path);

void save_loss_trace(const std::vector<double>& trace, const std::string& path);

}  // namespace sgdec

#endif  // SGDEC_TRAINER_HPP_
